import logging
import os
from sys import stderr

from loguru import logger

from src.config.config import settings

# ---------------------------------------------------------
# Настройка loguru с ротацией и архивированием
# ---------------------------------------------------------

# Создаем папку log, если её нет
log_dir = settings.LOG_DIR
os.makedirs(log_dir, exist_ok=True)

# Путь к файлу логов
log_file_path = os.path.join(log_dir, "waring_toolkit.log")

# Очищаем предыдущие обработчики loguru
logger.remove()

# Лог в файл с ротацией и сжатием
logger.add(
    log_file_path,
    level=settings.LOG_LEVEL,
    rotation=settings.LOG_ROTATION,
    compression="zip",  # Архивирование старых логов
    enqueue=True,  # Асинхронная запись через очередь
)

# Лог в консоль: stdout занят результатами команд, поэтому stderr
logger.add(stderr, level=settings.LOG_LEVEL, colorize=True)


# Перенаправление стандартного logging в loguru
class InterceptHandler(logging.Handler):
    def emit(self, record):
        level = record.levelname
        logger_opt = logger.opt(depth=6, exception=record.exc_info)
        logger_opt.log(level, record.getMessage())


# numba (JIT внутри galois) пишет в стандартный logging
numeric_loggers = [
    "numba",
    "galois",
]

for log_name in numeric_loggers:
    logging.getLogger(log_name).handlers = [InterceptHandler()]
    logging.getLogger(log_name).propagate = False
    logging.getLogger(log_name).setLevel(logging.WARNING)


def set_console_level(level: str):
    """Пересоздает консольный обработчик с новым уровнем (флаг -v в CLI)."""
    logger.remove()
    logger.add(log_file_path, level=settings.LOG_LEVEL, rotation=settings.LOG_ROTATION,
               compression="zip", enqueue=True)
    logger.add(stderr, level=level, colorize=True)
