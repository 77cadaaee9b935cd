try:
    from flask_sqlalchemy import SQLAlchemy
    from sqlalchemy.types import TypeDecorator, TEXT
except ImportError:
    print("This part of the package can only be imported with the web requirements.")
    raise

import json
from typing import Any, Dict, Optional

db = SQLAlchemy()


class JSONEncoded(TypeDecorator):
    """Enables JSON storage by encoding and decoding on the fly."""
    impl = TEXT
    cache_ok = True

    def process_bind_param(self, value, dialect):
        if value is None:
            return None
        return json.dumps(value, sort_keys=True)

    def process_result_value(self, value, dialect):
        if value is None:
            return None
        return json.loads(value)


class CensusEntry(db.Model):
    __tablename__ = 'census_rows'
    __table_args__ = (db.UniqueConstraint('d', 'mode', 'key'),)

    id = db.Column(db.Integer, primary_key=True, autoincrement=True, nullable=False)
    d = db.Column(db.Integer, nullable=False, index=True)
    mode = db.Column(db.String, nullable=False)
    key = db.Column(db.String, nullable=False)
    orbit_size = db.Column(db.Integer, nullable=False)
    stabilizer_order = db.Column(db.Integer, nullable=False)
    row = db.Column(JSONEncoded, nullable=False)

    def json(self, inject: Optional[Dict[str, Any]] = None):
        return {**self.row, **(inject or {})}


class FingerprintEntry(db.Model):
    __tablename__ = 'fingerprints'
    __table_args__ = (db.UniqueConstraint('d', 'k', 'h'),)

    id = db.Column(db.Integer, primary_key=True, autoincrement=True, nullable=False)
    d = db.Column(db.Integer, nullable=False, index=True)
    # k and h are set for scaled BW_k entries, d alone for build(d)
    k = db.Column(db.Integer, nullable=True)
    h = db.Column(db.Integer, nullable=True)
    fingerprint = db.Column(JSONEncoded, nullable=False)

    def json(self, inject: Optional[Dict[str, Any]] = None):
        data = {"d": self.d, "fingerprint": self.fingerprint, **(inject or {})}
        if self.k is not None:
            data["k"] = self.k
            data["h"] = self.h
        return data
