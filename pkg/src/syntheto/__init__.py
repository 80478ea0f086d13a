"""Workbench for program synthesis by transformational refinement.

Typical entry points:

    from syntheto.parser import parse_program
    from syntheto.printer import print_toplevel
    from syntheto.session import SessionState, submit_cell, edit_cell
    from syntheto.oracle import test_obligation, check_spec
    from syntheto.transfer import ast_to_transfer, serialize
"""

__version__ = "0.1.0"
