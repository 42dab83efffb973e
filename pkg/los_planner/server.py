"""
LoS Coverage and UAV Placement API

A FastAPI application serving coverage maps, placement searches and network
plans over the same scenario schema the command line reads from YAML.
"""

import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI

from .api import router
from .config import API_HOST, API_PORT, APP_VERSION, configure_logging

logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan management."""
    logger.info("LoS planner API starting up...")
    yield
    logger.info("LoS planner API shutting down...")


# FastAPI application with comprehensive OpenAPI metadata
app = FastAPI(
    title="LoS Coverage and UAV Placement API",
    description="""
    3D line-of-sight coverage and UAV placement planning for THz networks.

    ## Operations

    1. **Coverage** - LoS grid of every ground cell for fixed UAV positions
    2. **Placement** - greedy, genetic or hybrid search for UAV positions maximising LoS coverage
    3. **Planning** - clustering of ground nodes and UAV positioning maximising average THz capacity

    ## Usage

    - Use `/place_stream` for live progress (newline-delimited JSON)
    - Use `/place` and `/plan` for complete responses

    ## Scenarios

    Requests carry the scenario inline, with the same schema as the YAML
    scenario files: meters, degrees, GHz, mW and dBm.
    """,
    version=APP_VERSION,
    license_info={
        "name": "MIT",
        "url": "https://opensource.org/licenses/MIT",
    },
    lifespan=lifespan,
    tags_metadata=[
        {"name": "coverage", "description": "LoS coverage maps for fixed UAV positions"},
        {"name": "placement", "description": "UAV placement searches maximising LoS coverage"},
        {"name": "planning", "description": "Node clustering and UAV positioning for capacity"},
        {"name": "streaming", "description": "Live progress of long-running searches"},
        {"name": "health", "description": "Health check and system status endpoints"},
    ],
)

# Include API routes
app.include_router(router)


def main() -> None:
    import uvicorn

    configure_logging()
    uvicorn.run(app, host=API_HOST, port=API_PORT)


if __name__ == "__main__":
    main()
