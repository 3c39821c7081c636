"""Hand-built TimeML documents shared across test modules."""

from __future__ import annotations

from pathlib import Path


FIG2_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>fig2</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-02-06" functionInDocument="CREATION_TIME">02/06/1998</TIMEX3></DCT>
<TEXT>John <EVENT eid="e1" class="OCCURRENCE">arrived</EVENT> in Boston after <TIMEX3 tid="t1" type="TIME" value="1998-02-05T22:00">10 p.m.</TIMEX3></TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1" pos="VERB" tense="PAST"/>
<TLINK lid="l1" relType="AFTER" eventInstanceID="ei1" relatedToTime="t1"/>
<TLINK lid="l2" relType="BEFORE" eventInstanceID="ei1" relatedToTime="t0"/>
</TimeML>
"""

CHAIN_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>chain</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-03-01" functionInDocument="CREATION_TIME">03/01/1998</TIMEX3></DCT>
<TEXT>The market <EVENT eid="e1" class="OCCURRENCE">opened</EVENT>, then <EVENT eid="e2" class="OCCURRENCE">rallied</EVENT>, and finally <EVENT eid="e3" class="OCCURRENCE">closed</EVENT>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<MAKEINSTANCE eiid="ei3" eventID="e3"/>
<TLINK lid="l1" relType="IBEFORE" eventInstanceID="ei1" relatedToEventInstance="ei2"/>
<TLINK lid="l2" relType="BEFORE" eventInstanceID="ei2" relatedToEventInstance="ei3"/>
<TLINK lid="l3" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei3"/>
</TimeML>
"""

STARTS_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>starts</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-04-01" functionInDocument="CREATION_TIME">04/01/1998</TIMEX3></DCT>
<TEXT>The <EVENT eid="e1" class="OCCURRENCE">ceremony</EVENT> began the <EVENT eid="e2" class="OCCURRENCE">festival</EVENT> and the <EVENT eid="e3" class="OCCURRENCE">season</EVENT>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<MAKEINSTANCE eiid="ei3" eventID="e3"/>
<TLINK lid="l1" relType="BEGINS" eventInstanceID="ei1" relatedToEventInstance="ei2"/>
<TLINK lid="l2" relType="BEGINS" eventInstanceID="ei1" relatedToEventInstance="ei3"/>
</TimeML>
"""

LABELS_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>labels</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-05-01" functionInDocument="CREATION_TIME">05/01/1998</TIMEX3></DCT>
<TEXT>A <EVENT eid="e1" class="STATE">strike</EVENT> lasted through <TIMEX3 tid="t1" type="DATE" value="1998-04">April</TIMEX3> while talks <EVENT eid="e2" class="OCCURRENCE">continued</EVENT> and a deal was <EVENT eid="e3" class="OCCURRENCE">signed</EVENT>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<MAKEINSTANCE eiid="ei3" eventID="e3"/>
<TLINK lid="l1" relType="DURING" eventInstanceID="ei1" relatedToTime="t1"/>
<TLINK lid="l2" relType="IS_INCLUDED" eventInstanceID="ei2" relatedToTime="t1"/>
<TLINK lid="l3" relType="ENDED_BY" timeID="t1" relatedToEventInstance="ei3"/>
<TLINK lid="l4" relType="IDENTITY" eventInstanceID="ei1" relatedToTime="t1"/>
</TimeML>
"""

TEST_ONE_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>plat1</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-06-01" functionInDocument="CREATION_TIME">06/01/1998</TIMEX3></DCT>
<TEXT>Shares <EVENT eid="e1" class="OCCURRENCE">fell</EVENT> before the board <EVENT eid="e2" class="OCCURRENCE">met</EVENT> on <TIMEX3 tid="t1" type="DATE" value="1998-05-28">Thursday</TIMEX3>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<TLINK lid="l1" relType="BEFORE" eventInstanceID="ei1" relatedToEventInstance="ei2"/>
<TLINK lid="l2" relType="IS_INCLUDED" eventInstanceID="ei2" relatedToTime="t1"/>
<TLINK lid="l3" relType="BEFORE" eventInstanceID="ei1" relatedToTime="t0"/>
</TimeML>
"""

TEST_TWO_TML = """<?xml version="1.0" ?>
<TimeML>
<DOCID>plat2</DOCID>
<DCT><TIMEX3 tid="t0" type="DATE" value="1998-07-01" functionInDocument="CREATION_TIME">07/01/1998</TIMEX3></DCT>
<TEXT>The flood <EVENT eid="e1" class="OCCURRENCE">began</EVENT> as the rains <EVENT eid="e2" class="OCCURRENCE">peaked</EVENT>, and evacuations <EVENT eid="e3" class="OCCURRENCE">followed</EVENT>.</TEXT>
<MAKEINSTANCE eiid="ei1" eventID="e1"/>
<MAKEINSTANCE eiid="ei2" eventID="e2"/>
<MAKEINSTANCE eiid="ei3" eventID="e3"/>
<TLINK lid="l1" relType="SIMULTANEOUS" eventInstanceID="ei1" relatedToEventInstance="ei2"/>
<TLINK lid="l2" relType="BEFORE" eventInstanceID="ei2" relatedToEventInstance="ei3"/>
<TLINK lid="l3" relType="INCLUDES" timeID="t0" relatedToEventInstance="ei3"/>
</TimeML>
"""

TRAIN_DOCS = {
    "fig2": FIG2_TML,
    "chain": CHAIN_TML,
    "starts": STARTS_TML,
    "labels": LABELS_TML,
}
TEST_DOCS = {
    "plat1": TEST_ONE_TML,
    "plat2": TEST_TWO_TML,
}


def build_corpus_root(root: Path) -> Path:
    train_dir = root / "TBAQ-cleaned" / "TimeBank"
    test_dir = root / "te3-platinum"
    train_dir.mkdir(parents=True)
    test_dir.mkdir(parents=True)
    for name, xml in TRAIN_DOCS.items():
        (train_dir / f"{name}.tml").write_text(xml)
    for name, xml in TEST_DOCS.items():
        (test_dir / f"{name}.tml").write_text(xml)
    return root
