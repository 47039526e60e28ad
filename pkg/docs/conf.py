# -*- coding: utf-8 -*-
#
# Configuration file for the Sphinx documentation builder.
#
# This file does only contain a selection of the most common options. For a full
# list see the documentation:
# http://www.sphinx-doc.org/en/master/config

# -- Path setup --------------------------------------------------------------

import os
import sphinx_rtd_theme
import sys

# add path to this project before import
sys.path.insert(0, os.path.abspath('../src'))
import mptrack

# -- Project information -----------------------------------------------------

project = u'mptrack'
copyright = u'2020 The mptrack authors'
author = u'The mptrack authors'

# The full version, including alpha/beta/rc tags
release = mptrack.__version__
version = release

# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx_automodapi.automodapi',
]

numpydoc_show_class_members = False

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

language = None

exclude_patterns = [u'_build', 'Thumbs.db', '.DS_Store']

pygments_style = None

# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_path = [sphinx_rtd_theme.get_html_theme_path()]

html_static_path = []

htmlhelp_basename = 'mptrackdoc'

# -- Options for manual page output ------------------------------------------

man_pages = [
    (master_doc, 'mptrack', u'mptrack Documentation', [author], 1)
]

rst_epilog = """
.. |MpTrackVersion| replace:: {version}
""".format(version=mptrack.__version__)
