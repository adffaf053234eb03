import logging
from typing import Optional

from config import get_config


class IsodualApp:
    """Application context: configuration plus lazily built services"""

    def __init__(self, config_class):
        self.config = {
            key: getattr(config_class, key) for key in dir(config_class) if key.isupper()
        }
        self._catalog = None

    @property
    def catalog(self):
        if self._catalog is None:
            from .services.catalog_service import CatalogService

            self._catalog = CatalogService(self.config)
        return self._catalog


def create_app(config_name: Optional[str] = None) -> IsodualApp:
    # Load configuration
    if config_name:
        from config import config

        config_class = config[config_name]
    else:
        config_class = get_config()

    app = IsodualApp(config_class)
    config_class.init_app(app)
    logging.info(f"isodual initialised with {config_class.__name__}")
    return app
