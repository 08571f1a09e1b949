import sys

from hlp.cli import main

sys.exit(main())
