"""
Utilities

Configuration, logging, statistics and DOT export helpers.
"""

from vnlcm.utils.config import (
    DEFAULT_CONFIG,
    get_config_schema,
    get_config_value,
    get_default_config,
    load_config_file,
    load_config_from_args,
    merge_configs,
    save_config,
    set_config_value,
    validate_config,
)
from vnlcm.utils.dot import cfg_graph, cfg_to_dot, lcm_annotations, write_cfg_dots
from vnlcm.utils.logging import (
    LOG_LEVELS,
    JsonFormatter,
    PipelineLogger,
    configure_logging,
    setup_json_logger,
    setup_logger,
)
from vnlcm.utils.statistics import format_statistics_report, report_row, summarize_rows
