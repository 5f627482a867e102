import sys

from hyfi_cli.runner import main

sys.exit(main())
