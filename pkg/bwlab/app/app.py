try:
    import uritemplate
    from flask import Flask, request, Response
    from flask_sqlalchemy import SQLAlchemy
except ImportError:
    print("This part of the package can only be imported with the web requirements.")
    raise

import json
import logging
import os
from typing import Dict, Optional, Tuple

from bwlab.app.database import db, CensusEntry, FingerprintEntry
from bwlab.app.ingest import store_census, store_fingerprint
from bwlab.codes.boolquad import BoolWord
from bwlab.codes.census import MAX_EXHAUSTIVE_D
from bwlab.codes.rm2 import classify_word
from bwlab.errors import BwlabError
from bwlab.lattices.bw import MAX_LATTICE_D, ssbw_fingerprint


def msg_4xx(string, code=404) -> Response:
    return Response(json.dumps({"message": string}), status=code, mimetype="application/json")


def get_templates(base_uri: str) -> Dict[str, uritemplate.URITemplate]:
    return {
        "census": uritemplate.URITemplate(base_uri + "census/{?d}"),
        "fingerprint": uritemplate.URITemplate(base_uri + "fingerprint/{?d,k,h}"),
        "classify": uritemplate.URITemplate(base_uri + "classify/{?d,word}"),
    }


def census_view(d: Optional[int], templates: Dict[str, uritemplate.URITemplate]) -> Response:
    """ Cached exhaustive census table of RM(2,d), computed on the first request """
    if d is None:
        return msg_4xx("The d parameter is required", code=400)
    if not 1 <= d <= MAX_EXHAUSTIVE_D:
        return msg_4xx(f"Census tables are available for 1 <= d <= {MAX_EXHAUSTIVE_D}", code=400)
    rows = CensusEntry.query.filter_by(d=d, mode="exhaustive").all()
    if not rows:
        store_census(d)
        rows = CensusEntry.query.filter_by(d=d, mode="exhaustive").all()
    rows.sort(key=lambda r: r.id)
    return Response(json.dumps({
        "@id": templates["census"].expand({"d": d}),
        "d": d,
        "total": sum(r.orbit_size for r in rows),
        "rows": [r.json() for r in rows],
    }), mimetype="application/json", status=200)


def fingerprint_view(d: Optional[int], k: Optional[int], h: Optional[int],
                     templates: Dict[str, uritemplate.URITemplate]) -> Response:
    """ Fingerprint of build(d), of the scaled build(k) inside build(d), or of build(k) scaled by 2^h """
    if d is None and (k is None or h is None):
        return msg_4xx("Either d, or k and h, must be provided", code=400)
    if d is not None and h is not None:
        return msg_4xx("The h parameter cannot be combined with d, the scale is read from the table", code=400)
    for name, value in (("d", d), ("k", k)):
        if value is not None and not 0 <= value <= MAX_LATTICE_D:
            return msg_4xx(f"The {name} parameter must lie in [0, {MAX_LATTICE_D}]", code=400)
    if d is not None and k is not None and k > d:
        return msg_4xx("The k parameter cannot exceed d", code=400)
    if h is not None and h < 0:
        return msg_4xx("The h parameter must be nonnegative", code=400)

    if d is None:
        out = {"k": k, "h": h, "fingerprint": ssbw_fingerprint(k, h).json()}
    else:
        out = store_fingerprint(d, k).json()
    out["@id"] = templates["fingerprint"].expand({"d": d, "k": k, "h": h})
    return Response(json.dumps(out), mimetype="application/json", status=200)


def classify_view(d: Optional[int], word: Optional[str], templates: Dict[str, uritemplate.URITemplate]) -> Response:
    if d is None or not word:
        return msg_4xx("The d and word parameters are required", code=400)
    if not 1 <= d <= 10:
        return msg_4xx("The d parameter must lie in [1, 10]", code=400)
    try:
        out = classify_word(BoolWord.from_hex(d, word))
    except BwlabError as E:
        return msg_4xx(str(E), code=400)
    out["@id"] = templates["classify"].expand({"d": d, "word": word})
    return Response(json.dumps(out), mimetype="application/json", status=200)


def create_app(app: Flask) -> Tuple[Flask, SQLAlchemy]:
    """ Registers the read-only routes.

    Initialisation of the DB is up to you
    """
    @app.route("/")
    def index_route():
        templates = get_templates(request.url_root)
        return Response(
            json.dumps({
                "@id": f"{request.url_root}",
                "@type": "EntryPoint",
                **{name: template.uri for name, template in templates.items()},
            }),
            mimetype="application/json"
        )

    @app.route("/census/")
    def census_route():
        return census_view(request.args.get("d", type=int, default=None), templates=get_templates(request.url_root))

    @app.route("/fingerprint/")
    def fingerprint_route():
        return fingerprint_view(
            request.args.get("d", type=int, default=None),
            request.args.get("k", type=int, default=None),
            request.args.get("h", type=int, default=None),
            templates=get_templates(request.url_root)
        )

    @app.route("/classify/")
    def classify_route():
        return classify_view(
            request.args.get("d", type=int, default=None),
            request.args.get("word"),
            templates=get_templates(request.url_root)
        )

    return app, db


def serve(host: Optional[str] = None, port: Optional[int] = None, database_uri: Optional[str] = None):
    from bwlab.config import settings

    app = Flask(__name__)
    _, db = create_app(app)
    app.config['SQLALCHEMY_DATABASE_URI'] = database_uri or settings().database_uri
    app.config['SQLALCHEMY_TRACK_MODIFICATIONS'] = False
    db.init_app(app)
    with app.app_context():
        db.create_all()

    host = host or os.getenv("SERVER_HOST", "0.0.0.0")
    port = int(port or os.getenv("SERVER_PORT", 5000))
    logging.info(f"Serving cached results on {host}:{port}")
    if "prod" != os.getenv("SERVER_ENV", "prod"):
        app.run(debug=True, host=host, port=port)
    else:
        from waitress import serve as waitress_serve
        waitress_serve(app, host=host, port=port)


if __name__ == "__main__":
    serve()
