import sys

from cvwork.cli import main

sys.exit(main())
