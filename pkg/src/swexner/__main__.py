import sys

from swexner.cli import main

sys.exit(main())
