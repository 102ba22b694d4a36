from gramslice.utils.fileio import parse_file_mode, write_lines_secure, write_text_file_secure
from gramslice.utils.profiling import OperationProfiler

__all__ = ["OperationProfiler", "parse_file_mode", "write_lines_secure", "write_text_file_secure"]
