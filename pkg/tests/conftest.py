from __future__ import annotations

import warnings

import pytest

warnings.filterwarnings("ignore", message="Using `httpx` with `starlette.testclient`")

from fastapi.testclient import TestClient  # noqa: E402

from survstore import lending
from survstore.service import create_app
from survstore.store import Store, open_store


@pytest.fixture()
def store(tmp_path) -> Store:
    s = open_store(tmp_path / "data", durable=False)
    yield s
    s.close()


@pytest.fixture()
def app(store):
    return create_app(store)


@pytest.fixture()
def client(app):
    with TestClient(app, base_url="http://testserver") as c:
        yield c


@pytest.fixture()
def client_factory(app, client):
    """Fresh client per CLI invocation, talking ASGI-direct to the app."""
    return lambda: TestClient(app, base_url="http://testserver")


def seed_stock(store: Store) -> None:
    lending.upsert_instrument(store, "Total Station", 6, description="reflectorless")
    lending.upsert_instrument(store, "Automatic Level", 10)
    lending.upsert_instrument(store, "Steel Tape 50m", 12, faulty=2)
    lending.upsert_instrument(store, "GPS Receiver", 4)
