"""Run the command-line interface with python -m cvrpils."""

from .cli import console_entry

console_entry()
