import sys

from skyrmech.cli import main

sys.exit(main())
