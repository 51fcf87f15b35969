"""Wikitext/HTML to plain text.

Best effort: constructs not handled here stay in the output as literal text.
Every pass only shortens the text or leaves it unchanged, and the passes run
until a fixpoint, which is what makes :func:`strip_markup` idempotent.
"""

from __future__ import annotations

import html
import re

_COMMENT = re.compile(r"<!--.*?(?:-->|\Z)", re.S)
_REF_SELF = re.compile(r"<ref\b[^<>]*/>", re.I)
_REF_PAIR = re.compile(r"<ref\b[^<>]*>.*?</ref\s*>", re.I | re.S)
_DROP_ELEMENTS = re.compile(
    r"<(math|gallery|timeline|score|syntaxhighlight|source|table|imagemap|references)\b[^<>]*>.*?</\1\s*>",
    re.I | re.S,
)
_TEMPLATE = re.compile(r"\{\{[^{}]*\}\}")
_TEMPLATE_PARAM = re.compile(r"\{\{\{[^{}]*\}\}\}")
_TABLE = re.compile(r"\{\|(?:(?!\{\|).)*?\|\}", re.S)
_WIKILINK = re.compile(r"\[\[([^\[\]]*)\]\]")
_EXTLINK = re.compile(r"\[(?:https?:|ftp:)?//[^\s\[\]]*(?:\s+([^\[\]]*))?\]")
_BOLD_ITALIC = re.compile(r"'{5}|'{3}|'{2}")
_TAG = re.compile(r"</?[A-Za-z][A-Za-z0-9]*(?:\s[^<>]*)?/?>")
_HEADING = re.compile(r"^(={1,6})\s*(.*?)\s*\1\s*$", re.M)
_LIST_MARK = re.compile(r"^[*#:;]+\s*", re.M)
_RULE = re.compile(r"^-{4,}\s*$", re.M)
_MAGIC = re.compile(r"__[A-Z]+__")
_SPACES = re.compile(r"[^\S\n]+")

_DROP_NAMESPACES = (
    "file:",
    "image:",
    "category:",
    "media:",
    "datei:",
    "bild:",
    "kategorie:",
    "fichier:",
    "catégorie:",
    "archivo:",
    "categoría:",
    "categoria:",
    "файл:",
    "категория:",
    "ファイル:",
    "カテゴリ:",
    "文件:",
    "分类:",
)


def _resolve_link(m: re.Match[str]) -> str:
    inner = m.group(1)
    target, sep, label = inner.partition("|")
    t = target.strip().lower().lstrip(":")
    if t.startswith(_DROP_NAMESPACES) and not target.strip().startswith(":"):
        return ""
    if not sep:
        return target
    if "|" in label:
        label = label.rsplit("|", 1)[1]
    if not label:
        # pipe trick: [[Paris (city)|]] renders "Paris"
        return re.sub(r"\s*\(.*\)\s*$", "", target)
    return label


def _sub_to_fixpoint(pattern: re.Pattern[str], repl, text: str) -> str:
    while True:
        new = pattern.sub(repl, text)
        if new == text:
            return text
        text = new


def _strip_once(text: str) -> str:
    text = _COMMENT.sub("", text)
    text = _REF_SELF.sub("", text)
    text = _REF_PAIR.sub("", text)
    text = _DROP_ELEMENTS.sub("", text)
    text = _sub_to_fixpoint(_TEMPLATE_PARAM, "", text)
    text = _sub_to_fixpoint(_TEMPLATE, "", text)
    text = _sub_to_fixpoint(_TABLE, "", text)
    text = _sub_to_fixpoint(_WIKILINK, _resolve_link, text)
    text = _EXTLINK.sub(lambda m: m.group(1) or "", text)
    text = _BOLD_ITALIC.sub("", text)
    text = _TAG.sub("", text)
    text = _MAGIC.sub("", text)
    text = _HEADING.sub(r"\2", text)
    text = _RULE.sub("", text)
    text = _LIST_MARK.sub("", text)
    text = html.unescape(text)
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    lines = (_SPACES.sub(" ", line).strip() for line in text.split("\n"))
    return "\n".join(line for line in lines if line)


def strip_markup(body: str) -> str:
    """Render wikitext/HTML as plain text, one paragraph per line.

    >>> strip_markup("the [[France|French]] army")
    'the French army'
    """
    text = body
    while True:
        new = _strip_once(text)
        if new == text:
            return text
        text = new
