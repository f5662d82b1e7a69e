"""accretive-wave documentation build configuration file."""
# This file is execfile()d with the current directory set to its containing
# dir.
from __future__ import annotations

# -- General configuration -----------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx_tabs.tabs",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "accretive-wave"
copyright = "2026, the accretive-wave developers"  # noqa: A001

# The full version, including alpha/beta/rc tags.
__version__ = "0.3.0"
release = __version__
version = ".".join(release.split(".")[:2])

exclude_patterns = ["build"]
pygments_style = "sphinx"

# -- Options for HTML output ---------------------------------------------

html_theme = "furo"
htmlhelp_basename = "accretive_wavedoc"

# -- Options for manual page output --------------------------------------

man_pages = [
    (
        "script",
        "accretive-wave",
        "accretive-wave command line",
        ["the accretive-wave developers"],
        1,
    )
]

autodoc_member_order = "bysource"
sphinx_tabs_disable_tab_closing = True
