"""asefkit: a tool-agnostic static code analysis toolchain.

The pieces, bottom to top:

* ``asefkit.asef`` -- the ASEF exchange format: XML configuration and
  report documents, validation, and location resolution.
* ``asefkit.taxonomy`` -- hierarchical check categories, mappings from
  tool-native category names, and cross-tool report comparison.
* ``asefkit.minicheck`` -- a built-in demonstration analyzer for a small
  C-like language, based on an interval abstract domain, so the whole
  chain runs without any external analysis tool.
* ``asefkit.adapter`` -- runs a tool, converts its native report to ASEF
  and rewrites workspace paths to stable resource URIs.
* ``asefkit.resources`` -- linked analysis resources (cases, results,
  checks, locations, files) in an append-only on-disk store.
* ``asefkit.orchestrator`` -- reacts to git pushes, runs affected
  analysis cases, publishes reports into an analysis repository and
  ingests them into the resource store.
* ``asefkit.service`` -- the HTTP gateway used by the web frontend.
* ``asefkit.cli`` -- operator commands (validate, analyze, convert,
  diff, serve, watch, init-demo).
"""

__version__ = "0.1.0"
