import logging
import os

import mpmath
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration class"""

    # Numerics
    TOLERANCE = float(os.getenv('ISODUAL_TOLERANCE', '1e-9'))
    ROOT_TOLERANCE = 1e-7  # eigenvalue clustering for the tangent polynomial
    MPMATH_DPS = 50

    # Search budgets
    SEARCH_BOUND = int(os.getenv('ISODUAL_SEARCH_BOUND', '3'))
    MAX_GROUP_ORDER = int(os.getenv('ISODUAL_MAX_GROUP_ORDER', '50000'))
    MAX_ENUMERATION = 200000
    MAX_INCLUSION_SCAN = int(os.getenv('ISODUAL_MAX_INCLUSION_SCAN', '2000'))

    # Catalog
    DATA_DIR = os.getenv(
        'ISODUAL_DATA',
        os.path.join(os.path.dirname(os.path.abspath(__file__)), 'isodual', 'data'),
    )
    SCHEMA_DIR = os.path.join(
        os.path.dirname(os.path.abspath(__file__)), 'isodual', 'static', 'schemas'
    )

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

    @staticmethod
    def init_app(app):
        """Apply the process-wide settings: log level and mpmath precision"""
        logging.basicConfig(
            level=getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.INFO),
            format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        )
        mpmath.mp.dps = app.config['MPMATH_DPS']


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    TESTING = False


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    LOG_LEVEL = 'WARNING'
    MAX_GROUP_ORDER = 5000
    MAX_ENUMERATION = 50000
    MAX_INCLUSION_SCAN = 500


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config():
    """Get configuration based on environment"""
    env = os.getenv('ISODUAL_ENV', 'development')
    return config.get(env, config['default'])
