# -*- coding: utf-8 -*-
#
# ForecastRating documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# the packages live one directory up
sys.path.insert(0, os.path.abspath('..'))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'ForecastRating'
copyright = u'2026, ForecastRating authors'

version = 'v0.1.0'
release = 'v0.1.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

autodoc_member_order = 'bysource'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'ForecastRatingdoc'

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'rate_forecasts', u'ForecastRating Documentation',
     [u'ForecastRating authors'], 1)
]
