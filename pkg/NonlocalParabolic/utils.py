import os
import json
import math
import hashlib
import logging


def set_logging_level():
    for handler in logging.root.handlers[:]:
       logging.root.removeHandler(handler)
    log_level = os.environ.get('PARABOLIC_LOG', 'info')
    log_level = log_level.lower()
    if log_level == 'debug':
        level = logging.DEBUG
    elif log_level == 'info':
        level = logging.INFO
    elif log_level == 'warning':
        level = logging.WARNING
    elif log_level == 'error':
        level = logging.ERROR
    else:
        level = logging.ERROR
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(pathname)s [line:%(lineno)d] %(levelname)s %(funcName)s %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )


def report_scalar(value, digits=2):
    """
    Scalar as written into JSON reports: full precision value plus a rounded display string.
    @value: float or None
    @digits: int, decimals of the display field
    """
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return {'value': str(value), 'display': str(value)}
    return {'value': float(f'{value:.17g}'), 'display': f'{value:.{digits}f}'}


def stable_key(payload) -> str:
    """sha256 of a JSON-serializable payload, keys sorted"""
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]
