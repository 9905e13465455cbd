import sys

from src.cli.cli import run
from src.config.logger_config import logger


def main() -> int:
    """Запуск командной строки"""
    try:
        return run(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Остановлено пользователем.")
        return 130
    finally:
        logger.complete()  # Дождаться записи всех логов


if __name__ == "__main__":
    sys.exit(main())
