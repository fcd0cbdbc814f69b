"""
로깅 설정
"""
import logging

_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"
_configured = False


def setup_logging(level: str = "INFO") -> None:
    """루트 로거를 한 번만 설정 (CLI, 서버 공용)"""
    global _configured
    numeric = getattr(logging, level.upper(), logging.INFO)
    if _configured:
        logging.getLogger().setLevel(numeric)
        return
    logging.basicConfig(level=numeric, format=_FORMAT)
    _configured = True
