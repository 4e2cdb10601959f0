import sys

from slegp.cli import main

sys.exit(main())
