from .config import load_problem, load_problem_text, dump_problem, split_top_level, bundled_problem, PROBLEMS_DIR
from .report import RunReport, validate_report, render_summary, write_report, load_schema, __version__
from .store import ReportStore, constants_key
