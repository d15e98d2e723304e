# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import CoverReport, CoverSpec, ErrorBox, Subdomain, TableBuildError, TableMetadata
from .cover import build_cover, count_clamped_peaks, cover_report, feasible_peak_vels, retained_cells
from .endpoints import EndpointReport, FeedbackGains, endpoint_experiment
from .table import TrackingErrorTable, compute_table, error_box_for_interval, max_error_extent, query
from .table_file import load_table, save_table
