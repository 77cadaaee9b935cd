import os
import pytest
from flask import Flask
from bwlab.app.app import create_app
from bwlab.app.database import CensusEntry, FingerprintEntry
from bwlab.app.ingest import store_census, store_fingerprint
import uritemplate

basedir = os.path.abspath(os.path.dirname(__file__))
BASE_URI = "http://localhost"


@pytest.fixture
def app():
    """Fixture to create a new instance of the Flask app for testing."""
    app = Flask(__name__)
    app, db = create_app(app)
    db_path = os.path.join(basedir, 'app.db')
    app.config['SQLALCHEMY_DATABASE_URI'] = f'sqlite:///{db_path}'
    app.config['SQLALCHEMY_TRACK_MODIFICATIONS'] = False
    db.init_app(app)

    with app.app_context():
        db.create_all()
        store_census(3)

    yield app

    # Teardown: Drop all tables after each test
    with app.app_context():
        db.session.remove()
        db.drop_all()


@pytest.fixture
def client(app):
    """Fixture to create a test client for the Flask app."""
    return app.test_client()


def test_index(client):
    """Test the index route."""
    response = client.get('/')
    assert response.status_code == 200
    assert response.get_json() == {
        '@id': 'http://localhost/',
        '@type': 'EntryPoint',
        'census': 'http://localhost/census/{?d}',
        'fingerprint': 'http://localhost/fingerprint/{?d,k,h}',
        'classify': 'http://localhost/classify/{?d,word}',
    }


def test_census(client):
    template = uritemplate.URITemplate(client.get('/').get_json()["census"].replace(BASE_URI, ""))
    response = client.get(template.expand({"d": 3}))
    assert response.status_code == 200
    j = response.get_json()
    assert j["@id"] == "http://localhost/census/?d=3"
    assert j["total"] == 128
    assert {row["key"]: row["orbit_size"] for row in j["rows"]} == {
        "Short0": 1, "Short1": 28, "Long0": 1, "Long1": 28, "MidsetAffine": 14, "MidsetNonaffine1": 56
    }


def test_census_is_computed_once(app, client):
    assert client.get('/census/?d=2').get_json()["total"] == 16
    with app.app_context():
        count = CensusEntry.query.filter_by(d=2).count()
    client.get('/census/?d=2')
    with app.app_context():
        assert CensusEntry.query.filter_by(d=2).count() == count


@pytest.mark.parametrize("query", ["/census/", "/census/?d=0", "/census/?d=7"])
def test_census_errors(client, query):
    response = client.get(query)
    assert response.status_code == 400
    assert "message" in response.get_json()


def test_fingerprint(client):
    j = client.get('/fingerprint/?d=3').get_json()
    assert j["@id"] == "http://localhost/fingerprint/?d=3"
    assert j["fingerprint"]["det"] == "256"
    assert j["fingerprint"]["kissing"] == 240
    assert "k" not in j

    j = client.get('/fingerprint/?d=3&k=1').get_json()
    assert (j["k"], j["h"]) == (1, 2)
    assert j["fingerprint"]["min_norm"] == "4"

    j = client.get('/fingerprint/?k=2&h=1').get_json()
    assert j["fingerprint"]["det"] == "64"


def test_fingerprint_cache(app):
    with app.app_context():
        first = store_fingerprint(2)
        assert store_fingerprint(2).id == first.id
        assert FingerprintEntry.query.filter_by(d=2).count() == 1


@pytest.mark.parametrize("query", [
    "/fingerprint/",
    "/fingerprint/?k=2",
    "/fingerprint/?d=3&h=1",
    "/fingerprint/?d=6",
    "/fingerprint/?d=2&k=3",
    "/fingerprint/?k=2&h=-1",
])
def test_fingerprint_errors(client, query):
    assert client.get(query).status_code == 400


def test_classify(client):
    j = client.get('/classify/?d=3&word=78').get_json()
    assert j["key"] == "MidsetNonaffine1"
    assert j["@id"] == "http://localhost/classify/?d=3&word=78"
    assert client.get('/classify/?d=3&word=80').status_code == 400
    assert client.get('/classify/?d=3').status_code == 400
