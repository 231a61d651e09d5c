import logging
import os

# Configure the logger
logging.basicConfig(
    level=os.getenv('QUASILAT_LOG_LEVEL', 'INFO').upper(),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)

# Create a logger instance
logger = logging.getLogger('QuasiLat')


def set_log_level(level: str) -> None:
    """Adjust the package logger after the environment has been loaded."""
    logger.setLevel(level.upper())
