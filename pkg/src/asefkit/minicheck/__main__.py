import sys

from asefkit.minicheck.cli import main

sys.exit(main())
