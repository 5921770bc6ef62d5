"""HTTP translation gateway: service core, batching, rate limits, server."""

from .config import ServiceConfig, load_config
from .service import ApiError, TranslationRequest, TranslationResponse, TranslationService
from .http import GatewayServer, serve

__all__ = [
    "ApiError",
    "GatewayServer",
    "ServiceConfig",
    "TranslationRequest",
    "TranslationResponse",
    "TranslationService",
    "load_config",
    "serve",
]
