import os
import sys

# Setup logging first
from src.utils.logging_config import setup_logging, get_logger
setup_logging(
    log_level=os.getenv("LOG_LEVEL", "INFO"),
    enable_file_logging=os.getenv("ENABLE_FILE_LOGGING", "false").lower() == "true"
)

logger = get_logger('main')

from src.cli.commands import parse_args, run
from src.utils.error_handler import handle_cli_error, safe_cli_operation


@safe_cli_operation("cantor-ei")
def execute(run_config) -> int:
    return run(run_config)


def main(argv=None) -> int:
    try:
        run_config = parse_args(argv)
    except Exception as e:
        return handle_cli_error(e, "configuration")

    # Re-apply logging with the run's own level and quiet flag
    setup_logging(
        log_level=run_config.log_level,
        enable_file_logging=os.getenv("ENABLE_FILE_LOGGING", "false").lower() == "true",
        quiet=run_config.quiet,
    )
    logger.debug(f"{run_config.command}: config hash {run_config.config_hash()}")
    return execute(run_config)


if __name__ == "__main__":
    sys.exit(main())
