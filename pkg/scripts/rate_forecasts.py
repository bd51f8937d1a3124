##USAGE: python -m scripts.rate_forecasts <evaluate|simulate|curves> [options]

import sys

from ForecastRating.RatingCLI import main


if __name__ == "__main__":
    sys.exit(main())
