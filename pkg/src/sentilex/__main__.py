import sys

from sentilex.cli import main

sys.exit(main())
