"""Report and table output"""

from .report_writer import dumps, strip_volatile, to_plain, write_csv, write_experiment, write_json, write_table

__all__ = ['dumps', 'strip_volatile', 'to_plain', 'write_csv', 'write_experiment', 'write_json', 'write_table']
