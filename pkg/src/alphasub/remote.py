"""Fetch candidate labels from an HTTP annotator service.

Each batch of items is rendered into a prompt and POSTed as
``{"system": ..., "user": ...}``.  The response body must be a list of
labels, one per item, separated by newlines or commas.
"""

from __future__ import annotations

import json
import logging
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import requests

from .model import DataError
from .substitution import CandidateAnnotations

log = logging.getLogger(__name__)

TOKEN_ENV = "ALPHASUB_API_TOKEN"
PLACEHOLDER = "{items}"
MAX_ATTEMPTS = 3


class FetchError(DataError):
    pass


@dataclass(frozen=True)
class PromptTemplate:
    system: str
    user: str

    @classmethod
    def parse(cls, text: str) -> "PromptTemplate":
        """Split a template with ``--SYSTEM--`` and ``--USER--`` headers.

        Text without headers is used as the user message with an empty
        system message.
        """
        parts = re.split(r"^--(SYSTEM|USER)--\s*$", text, flags=re.MULTILINE)
        if len(parts) == 1:
            system, user = "", text
        else:
            sections = dict(zip(parts[1::2], (p.strip("\n") for p in parts[2::2])))
            system, user = sections.get("SYSTEM", ""), sections.get("USER", "")
        if PLACEHOLDER not in user and PLACEHOLDER not in system:
            raise FetchError(f"prompt template has no {PLACEHOLDER} placeholder")
        return cls(system, user)

    def render(self, descriptors: Sequence[str]) -> dict:
        listing = "\n".join(f"{k + 1}. {d}" for k, d in enumerate(descriptors))
        return {"system": self.system.replace(PLACEHOLDER, listing), "user": self.user.replace(PLACEHOLDER, listing)}


def parse_labels(body: str, expected: int, alphabet: Sequence[str] | None = None) -> list[str]:
    """Labels from a newline- or comma-separated response.

    Leading list markers such as ``3.`` or ``-`` are stripped.
    """
    tokens = [t.strip() for t in re.split(r"[\n,]", body.strip())]
    tokens = [re.sub(r"^(\d+[.)]\s+|[-*]\s+)", "", t).strip() for t in tokens if t]
    if len(tokens) != expected:
        raise FetchError(f"response has {len(tokens)} labels for {expected} items")
    if alphabet is not None:
        allowed = set(alphabet)
        for pos, t in enumerate(tokens):
            if t not in allowed:
                raise FetchError(f"unparseable label {t!r} at position {pos + 1}")
    return tokens


def _post(session, endpoint, payload, headers, timeout, sleep, backoff):
    delay = backoff
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            resp = session.post(endpoint, json=payload, headers=headers, timeout=timeout)
            resp.raise_for_status()
            return resp.text
        except requests.RequestException as err:
            if attempt == MAX_ATTEMPTS:
                raise FetchError(f"request to {endpoint} failed after {MAX_ATTEMPTS} attempts: {err}") from err
            log.warning("attempt %d failed (%s); retrying in %.2fs", attempt, err, delay)
            sleep(delay)
            delay *= 2


def fetch_candidate(
    endpoint: str,
    template: PromptTemplate | str,
    items: Sequence[tuple[str, str]],
    *,
    batch_size: int = 100,
    alphabet: Sequence[str] | None = None,
    source_tag: str = "remote",
    audit_path: str | Path | None = None,
    timeout: float = 60.0,
    backoff: float = 1.0,
    session: requests.Session | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> CandidateAnnotations:
    """Label ``items`` (pairs of item id and descriptor) batch by batch.

    Requests are sequential.  With ``audit_path`` every request, raw
    response and parsed label list is appended there as one JSON line.
    A bearer token is sent when ``ALPHASUB_API_TOKEN`` is set.
    """
    if isinstance(template, str):
        template = PromptTemplate.parse(template)
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    own = session is None
    session = session or requests.Session()
    labels: dict[str, str] = {}
    audit = open(audit_path, "a", encoding="utf-8") if audit_path else None
    try:
        for start in range(0, len(items), batch_size):
            batch = items[start : start + batch_size]
            payload = template.render([d for _, d in batch])
            body = _post(session, endpoint, payload, headers, timeout, sleep, backoff)
            record = {"batch": start // batch_size, "items": [i for i, _ in batch], "request": payload, "response": body}
            error = None
            try:
                parsed = parse_labels(body, len(batch), alphabet)
                record["labels"] = parsed
            except FetchError as err:
                error = err
                record["error"] = str(err)
            if audit:
                audit.write(json.dumps(record) + "\n")
                audit.flush()
            if error is not None:
                raise FetchError(f"batch {start // batch_size}: {error}") from error
            labels.update({item: lab for (item, _), lab in zip(batch, parsed)})
    finally:
        if audit:
            audit.close()
        if own:
            session.close()
    return CandidateAnnotations(labels, source_tag)
