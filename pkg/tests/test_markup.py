from __future__ import annotations

import mwparserfromhell

from atomedit.ingest.markup import strip_markup


def test_pipe_link_renders_label():
    assert strip_markup("the [[France|French]] army") == "the French army"


def test_bold_and_ref_removed():
    assert strip_markup("'''bold''' text <ref>x</ref>") == "bold text"


def test_infobox_matches_reference_renderer():
    body = "{{Infobox country|name=x}}Paris is big."
    expected = mwparserfromhell.parse(body).strip_code().strip()
    assert expected == "Paris is big."
    assert strip_markup(body) == expected


def test_nested_templates_and_tables():
    body = "{{a|{{b|c}}|d}}Text.\n{| class=x\n| cell\n|}\nMore text."
    assert strip_markup(body) == "Text.\nMore text."


def test_file_and_category_links_dropped():
    body = "[[File:X.jpg|thumb|A [[cat]]]]A cat.[[Category:Cats]]"
    assert strip_markup(body) == "A cat."


def test_external_links_and_entities():
    assert strip_markup("See [http://x.org the site] &amp; more.") == "See the site & more."


def test_headings_lists_comments():
    body = "== History ==\n* first <!-- hidden -->item\n# second"
    assert strip_markup(body) == "History\nfirst item\nsecond"


def test_self_closing_ref_and_html():
    assert strip_markup('A<ref name="n"/> <span style="x">b</span><br/>c') == "A bc"


def test_idempotent_on_tricky_input():
    body = "{{x}}'''a''' [[b|c]] <ref>d</ref>{{y|[[z]]}} e"
    once = strip_markup(body)
    assert strip_markup(once) == once
