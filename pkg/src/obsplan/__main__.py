import sys

from obsplan.cli import main

sys.exit(main())
