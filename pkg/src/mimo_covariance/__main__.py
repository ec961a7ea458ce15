import sys

from mimo_covariance.experiments.cli import main

sys.exit(main())
