from __future__ import annotations

import itertools

import pytest

from fria.catalog import Thresholds
from fria.errors import EvidenceRequired, MissingRationale, NoScenarioApplicable, SchemaError
from fria.profile import DriverSet, LifecycleStage, StakeholderRef
from fria.scenarios import (
    Classification,
    ControlAssessment,
    ControlEffectiveness,
    DimensionScores,
    ScenarioInstance,
    apply_override,
    classify,
    evaluation_from_json,
    evaluation_to_json,
    finalize_criterion,
    instantiate_scenarios,
    make_evaluation,
)

from oracles import classification_oracle

LEAD = StakeholderRef(name="Dana Reyes", role="clinical_lead")


def dims(i, s, m, d) -> DimensionScores:
    return DimensionScores(individuals=i, society=s, mitigation_effort=m, duration=d)


def ctrl(effectiveness: str, evidence=()) -> ControlAssessment:
    return ControlAssessment(
        effectiveness=ControlEffectiveness(effectiveness),
        evidence_refs=tuple(evidence),
        control_owner=LEAD,
    )


def instance(sid="s1", criterion="c1") -> ScenarioInstance:
    return ScenarioInstance(
        id=sid, template_id=sid, criterion_id=criterion, narrative="n", assigned_to=LEAD
    )


def evaluation(sid: str, classification: Classification):
    ev = make_evaluation(instance(sid), dims(3, 3, 3, 3), ctrl("Absent"), "r", Thresholds())
    return apply_override(ev, "forced for test", LEAD, classification=classification)


# -- classify -----------------------------------------------------------------


def test_severe_dimensions_without_controls_are_relevant_and_significant():
    classification, significant = classify(dims(3, 2, 2, 2), ctrl("Absent"), Thresholds())
    assert classification is Classification.RELEVANT
    assert significant is True


def test_zero_dimensions_are_irrelevant_for_any_control():
    for effectiveness in ControlEffectiveness:
        classification, significant = classify(
            dims(0, 0, 0, 0), ctrl(effectiveness.value, ["e"]), Thresholds()
        )
        assert classification is Classification.IRRELEVANT
        assert significant is False


def test_exhaustive_1024_combinations_match_oracle():
    t = Thresholds()
    checked = 0
    for i, s, m, d in itertools.product(range(4), repeat=4):
        for effectiveness in ControlEffectiveness:
            expected_cls, expected_sig = classification_oracle(
                i, s, m, d, effectiveness.value
            )
            got_cls, got_sig = classify(dims(i, s, m, d), ctrl(effectiveness.value), t)
            assert got_cls.value == expected_cls
            assert got_sig == expected_sig
            checked += 1
    assert checked == 1024


def test_classify_monotone_in_each_dimension():
    t = Thresholds()
    rank = {
        Classification.IRRELEVANT: 0,
        Classification.PARTIALLY_RELEVANT: 1,
        Classification.RELEVANT: 2,
    }
    for i, s, m, d in itertools.product(range(4), repeat=4):
        base_cls, base_sig = classify(dims(i, s, m, d), ctrl("PartiallyEffective", ["e"]), t)
        for axis in range(4):
            values = [i, s, m, d]
            if values[axis] == 3:
                continue
            values[axis] += 1
            up_cls, up_sig = classify(dims(*values), ctrl("PartiallyEffective", ["e"]), t)
            assert rank[up_cls] >= rank[base_cls]
            assert up_sig or not base_sig


def test_classify_antitone_in_control_strength():
    t = Thresholds()
    order = ["Absent", "Ineffective", "PartiallyEffective", "Effective"]
    rank = {
        Classification.IRRELEVANT: 0,
        Classification.PARTIALLY_RELEVANT: 1,
        Classification.RELEVANT: 2,
    }
    for i, s, m, d in itertools.product(range(4), repeat=4):
        previous = None
        for effectiveness in order:
            cls, _ = classify(dims(i, s, m, d), ctrl(effectiveness, ["e"]), t)
            if previous is not None:
                assert rank[cls] <= previous
            previous = rank[cls]


def test_significance_respects_configured_dimensions():
    t = Thresholds(significance_dimensions=("society",), significance_dimension_min=3)
    _, significant = classify(dims(3, 2, 0, 0), ctrl("Absent"), t)
    assert significant is False
    _, significant = classify(dims(0, 3, 0, 0), ctrl("Absent"), t)
    assert significant is True


def test_dimension_out_of_range_rejected():
    with pytest.raises(SchemaError):
        dims(4, 0, 0, 0)
    with pytest.raises(SchemaError):
        dims(0, -1, 0, 0)


# -- instantiate_scenarios ------------------------------------------------------


def test_triage_instantiation(triage_catalog, triage_drivers):
    instances = instantiate_scenarios(
        ["fa_equal_treatment", "ho_meaningful_control"], triage_catalog, triage_drivers
    )
    ids = [i.id for i in instances]
    assert ids == ["fa_s_underrepresentation", "ho_s_automation_bias"]
    roles = {i.id: i.assigned_to.role for i in instances}
    assert roles["ho_s_automation_bias"] == "clinical_lead"
    assert roles["fa_s_underrepresentation"] == "compliance_officer"


def test_empty_advancing_set_gives_no_instances(triage_catalog, triage_drivers):
    assert instantiate_scenarios([], triage_catalog, triage_drivers) == []


def test_driver_filtered_templates_are_skipped(triage_catalog, triage_drivers):
    # oversight has two templates; the generative one fails the predicate
    instances = instantiate_scenarios(
        ["ho_meaningful_control"], triage_catalog, triage_drivers
    )
    assert [i.id for i in instances] == ["ho_s_automation_bias"]
    genai_drivers = DriverSet(
        lifecycle_stage=LifecycleStage.IMPLEMENTATION,
        domain_flags=frozenset({"generative_ai"}),
        system_types=frozenset(),
    )
    both = instantiate_scenarios(["ho_meaningful_control"], triage_catalog, genai_drivers)
    assert [i.id for i in both] == ["ho_s_automation_bias", "ho_s_genai_hallucination"]


def test_advancing_criterion_with_no_applicable_template_is_surfaced(triage_catalog):
    # a driver set that fails every data-governance template does not exist in
    # the fixture, so force the situation with a lifecycle-only driver set and
    # a catalog whose dg template is filtered; use the genai template criterion
    drivers = DriverSet(
        lifecycle_stage=LifecycleStage.DESIGN,
        domain_flags=frozenset(),
        system_types=frozenset(),
    )
    stripped = triage_catalog
    filtered = [
        t.id
        for t in stripped.templates_of("ho_meaningful_control")
        if not t.applicability.is_vacuous()
    ]
    assert filtered == ["ho_s_genai_hallucination"]
    # remove the unconditional template so nothing passes
    from fria.catalog import Catalog

    mutated = Catalog(
        schema_version=stripped.schema_version,
        domains=stripped.domains,
        criteria=stripped.criteria,
        questions=stripped.questions,
        scenario_templates=tuple(
            t for t in stripped.scenario_templates if t.id != "ho_s_automation_bias"
        ),
        thresholds=stripped.thresholds,
    )
    with pytest.raises(NoScenarioApplicable):
        instantiate_scenarios(["ho_meaningful_control"], mutated, drivers)


# -- make_evaluation / overrides -------------------------------------------------


def test_partially_effective_control_drops_residual_one_level():
    t = Thresholds()
    before, _ = classify(dims(2, 2, 1, 2), ctrl("Absent"), t)
    after, _ = classify(
        dims(2, 2, 1, 2), ctrl("PartiallyEffective", ["override-protocol"]), t
    )
    assert before is Classification.RELEVANT
    assert after is Classification.PARTIALLY_RELEVANT


def test_claimed_effectiveness_requires_evidence():
    with pytest.raises(EvidenceRequired):
        make_evaluation(instance(), dims(2, 2, 2, 2), ctrl("Effective"), "r", Thresholds())
    with pytest.raises(EvidenceRequired):
        make_evaluation(
            instance(), dims(2, 2, 2, 2), ctrl("PartiallyEffective"), "r", Thresholds()
        )
    ok = make_evaluation(
        instance(), dims(2, 2, 2, 2), ctrl("Effective", ["evidence-doc"]), "r", Thresholds()
    )
    assert ok.classification is Classification.IRRELEVANT


def test_rationale_required():
    with pytest.raises(MissingRationale):
        make_evaluation(instance(), dims(1, 1, 1, 1), ctrl("Absent"), "  ", Thresholds())


def test_override_changes_outcome_but_not_dimensions():
    ev = make_evaluation(instance(), dims(3, 3, 3, 3), ctrl("Absent"), "r", Thresholds())
    overridden = apply_override(
        ev, "risk accepted by board", LEAD, classification=Classification.PARTIALLY_RELEVANT
    )
    assert overridden.classification is Classification.PARTIALLY_RELEVANT
    assert overridden.dimensions == ev.dimensions
    assert overridden.control == ev.control
    assert overridden.override.rationale == "risk accepted by board"
    assert overridden.significant is ev.significant


def test_override_requires_rationale():
    ev = make_evaluation(instance(), dims(3, 3, 3, 3), ctrl("Absent"), "r", Thresholds())
    with pytest.raises(MissingRationale):
        apply_override(ev, "", LEAD, classification=Classification.IRRELEVANT)


# -- finalize_criterion -----------------------------------------------------------


def test_single_relevant_scenario_finalizes_relevant():
    final = finalize_criterion("fa", [evaluation("s1", Classification.RELEVANT)])
    assert final.classification is Classification.RELEVANT


def test_all_irrelevant_finalizes_irrelevant():
    evals = [evaluation(f"s{i}", Classification.IRRELEVANT) for i in range(3)]
    assert finalize_criterion("c", evals).classification is Classification.IRRELEVANT


def test_mixed_classifications_take_maximum():
    evals = [
        evaluation("s1", Classification.IRRELEVANT),
        evaluation("s2", Classification.PARTIALLY_RELEVANT),
    ]
    assert finalize_criterion("c", evals).classification is Classification.PARTIALLY_RELEVANT


def test_finalize_matches_bruteforce_over_all_assignments():
    # all 3^4 assignments for four scenarios
    rank = {"Irrelevant": 0, "PartiallyRelevant": 1, "Relevant": 2}
    values = [
        Classification.IRRELEVANT,
        Classification.PARTIALLY_RELEVANT,
        Classification.RELEVANT,
    ]
    count = 0
    for combo in itertools.product(values, repeat=4):
        evals = [evaluation(f"s{i}", c) for i, c in enumerate(combo)]
        final = finalize_criterion("c", evals)
        expected = max((c.value for c in combo), key=lambda v: rank[v])
        assert final.classification.value == expected
        count += 1
    assert count == 81


def test_evaluation_json_round_trip():
    ev = make_evaluation(
        instance(), dims(2, 1, 0, 3), ctrl("PartiallyEffective", ["doc"]), "because", Thresholds()
    )
    ev = apply_override(ev, "adjusted", LEAD, significant=False)
    assert evaluation_from_json(evaluation_to_json(ev)) == ev
