from .runner import RunReport, RunSpec, SigmaRule, local_curvature, run, run_one
from .testpdf import get_test_pdf, sample_test_pdf, test_pdf_eval

test_pdf_eval.__test__ = False
