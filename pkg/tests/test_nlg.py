import math

import numpy as np
import pytest

from factorargs import (
    BayesianNetwork,
    BeliefUpdate,
    Factor,
    Variable,
    build_factor_graph,
    classify_step,
    counterfactual_effect,
    find_maximal_proper_fas,
    qualifier,
    render,
    render_baseline_summary,
    step_effect,
    obs,
)
from factorargs.arguments import StepTrace
from factorargs.errors import ValidationError
from factorargs.network import FGNode
from factorargs.nlg import logodds_range, strip_markup, _counterfactual_from_trace

from conftest import FIG1C_EVIDENCE, FIG1C_TARGET
from oracle_utils import ref_step_effect

OVERVIEW_GOLDEN = (
    "Since <XRay Result> is <abnormal> and <Tuberculosis> is <absent>, "
    "we infer that <Lung Cancer> = <present>."
)

DIRECT_GOLDEN = """\
We have observed that <XRay Result> is <abnormal> and <Tuberculosis> is <absent>.
The updated probability of <XRay Result> = <abnormal> is evidence that the intermediate node <Tuberculosis or Cancer> becomes strongly more likely to be <true>.
The updated probability of <Tuberculosis or Cancer> = <true> and <Tuberculosis> = <absent> is evidence that the target node <Lung Cancer> becomes strongly more likely to be <present>."""

CONTRASTIVE_GOLDEN = """\
We have observed that <XRay Result> is <abnormal> and <Tuberculosis> is <absent>.
The updated probability of <XRay Result> = <abnormal> is evidence that the intermediate node <Tuberculosis or Cancer> becomes strongly more likely to be <true>.
Usually, if the <Tuberculosis or Cancer> = <true> then the <Lung Cancer> = <present>.
Since the <Tuberculosis> is <absent>, we can be strongly more certain that <Lung Cancer> = <present>."""


@pytest.fixture(scope="module")
def fig1c_ranked(asia_module):
    ranked = find_maximal_proper_fas(asia_module, FIG1C_TARGET, FIG1C_EVIDENCE)
    return ranked[0]


@pytest.fixture(scope="module")
def asia_module():
    from factorargs.fixtures import load

    return load("asia")


def _var(name):
    return FGNode("var", name)


def _fac(name):
    return FGNode("factor", name)


class TestClassifyStep:
    def test_fig1c_first_step_evidential(self, asia_module, fig1c_ranked):
        fa = fig1c_ranked.argument
        assert classify_step(asia_module, fa, _fac("XRay Result")) == "evidential"

    def test_chain_causal(self, chain):
        from factorargs import single_path_arguments

        fg = build_factor_graph(chain)
        fa = single_path_arguments(fg, "C", {"A": "1"})[0]
        assert classify_step(chain, fa, _fac("B")) == "causal"
        assert classify_step(chain, fa, _fac("C")) == "causal"

    def test_fig1c_final_step_intercausal(self, asia_module, fig1c_ranked):
        fa = fig1c_ranked.argument
        assert (
            classify_step(asia_module, fa, _fac("Tuberculosis or Cancer")) == "intercausal"
        )


class TestQualifier:
    @pytest.mark.parametrize(
        "value,label",
        [
            (15.0, "Certainly"),
            (2.0, "Strongly"),
            (0.7, "Moderately"),
            (0.3, "Weakly"),
            (0.05, "Tenuously"),
            (10.0, "Strongly"),
            (1.0, "Moderately"),
            (0.5, "Weakly"),
            (0.1, "Tenuously"),
            (math.inf, "Certainly"),
        ],
    )
    def test_threshold_table(self, value, label):
        assert qualifier(value).label == label

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            qualifier(-0.1)


class TestGoldenTexts:
    def test_overview(self, asia_module, fig1c_ranked):
        assert render(fig1c_ranked, "overview", asia_module).text == OVERVIEW_GOLDEN

    def test_direct(self, asia_module, fig1c_ranked):
        assert render(fig1c_ranked, "direct", asia_module).text == DIRECT_GOLDEN

    def test_contrastive(self, asia_module, fig1c_ranked):
        assert render(fig1c_ranked, "contrastive", asia_module).text == CONTRASTIVE_GOLDEN

    def test_overview_never_mentions_intermediates(self, asia_module, fig1c_ranked):
        text = render(fig1c_ranked, "overview", asia_module).text
        assert "Tuberculosis or Cancer" not in text

    def test_strip_markup(self):
        assert strip_markup("<A> is <b>.") == "A is b."


class TestRenderProperties:
    def test_render_deterministic_all_modes(self, asia_module, fig1c_ranked):
        for mode in ("overview", "direct", "contrastive"):
            a = render(fig1c_ranked, mode, asia_module)
            b = render(fig1c_ranked, mode, asia_module)
            assert a.text == b.text
            assert a.mode == mode

    def test_modes_differ_only_at_intercausal(self, asia_module, chain):
        # chain arguments have no intercausal step: both modes byte-identical
        from factorargs import find_maximal_proper_fas as search

        ranked = search(chain, "C", {"A": "1"})[0]
        direct = render(ranked, "direct", chain).text
        contrastive = render(ranked, "contrastive", chain).text
        assert direct == contrastive

        fig = search(asia_module, FIG1C_TARGET, FIG1C_EVIDENCE)[0]
        d_lines = render(fig, "direct", asia_module).text.split("\n")
        c_lines = render(fig, "contrastive", asia_module).text.split("\n")
        assert d_lines[:2] == c_lines[:2]
        assert d_lines[2:] != c_lines[2:]

    def test_qualifiers_match_recomputation(self, asia_module, fig1c_ranked):
        expl = render(fig1c_ranked, "direct", asia_module)
        recomputed = [
            qualifier(logodds_range(st.effect)).label
            for st in fig1c_ranked.step_effects
        ]
        assert [s.qualifier for s in expl.steps] == recomputed

    def test_unknown_mode_rejected(self, asia_module, fig1c_ranked):
        with pytest.raises(ValidationError):
            render(fig1c_ranked, "verbose", asia_module)

    def test_render_total_over_fixture_queries(self, asia_module, chain, and_net):
        # every ranked argument of every query renders in every mode
        queries = [
            (asia_module, FIG1C_TARGET, FIG1C_EVIDENCE),
            (asia_module, "Dyspnea", {"Smoker": "true", "World Travel": "yes"}),
            (asia_module, "Smoker", {"Dyspnea": "present", "XRay Result": "normal"}),
            (chain, "A", {"C": "1"}),
            (and_net, "B", {"A": "1", "C": "1"}),
        ]
        for bn, target, evidence in queries:
            for ranked in find_maximal_proper_fas(bn, target, evidence):
                for mode in ("overview", "direct", "contrastive"):
                    text = render(ranked, mode, bn).text
                    assert text and text == render(ranked, mode, bn).text

    def test_missing_trace_rejected(self, asia_module, fig1c_ranked):
        from factorargs import RankedFA

        bare = RankedFA(
            argument=fig1c_ranked.argument,
            effect=fig1c_ranked.effect,
            strength=fig1c_ranked.strength,
            argued_state=fig1c_ranked.argued_state,
            step_effects=(),
            node_effects={},
        )
        with pytest.raises(ValidationError):
            render(bare, "direct", asia_module)


def _flip_network() -> BayesianNetwork:
    """Collider whose co-parent reverses the child's implication."""
    a, b, c = (Variable(n, ("0", "1")) for n in "ABC")
    return BayesianNetwork(
        "flip",
        [a, b, c],
        {
            "A": Factor.from_cpt(a, (), [0.5, 0.5]),
            "B": Factor.from_cpt(b, (), [0.5, 0.5]),
            "C": Factor.from_cpt(
                c, (a, b),
                {
                    ("0", "0"): [0.8, 0.2],
                    ("1", "0"): [0.1, 0.9],
                    ("0", "1"): [0.2, 0.8],
                    ("1", "1"): [0.7, 0.3],
                },
            ),
        },
    )


class TestCounterfactual:
    def test_fig1c_counterfactual_state(self, asia_module, fig1c_ranked):
        fa = fig1c_ranked.argument
        cf = counterfactual_effect(
            asia_module, fa, _fac("Tuberculosis or Cancer"), FIG1C_EVIDENCE
        )
        assert cf.argued_state() == "present"
        assert cf.prob("present") == pytest.approx(2 / 3, abs=1e-12)

    def test_non_intercausal_step_rejected(self, asia_module, fig1c_ranked):
        with pytest.raises(ValidationError):
            counterfactual_effect(
                asia_module, fig1c_ranked.argument, _fac("XRay Result"), FIG1C_EVIDENCE
            )

    def test_uniform_coparent_premise_counterfactual_equals_factual(self, and_net):
        # with the child premise already lopsided and the co-parent uniform,
        # the counterfactual recomputation changes nothing
        cvar = and_net.var("C")
        avar = and_net.var("A")
        bvar = and_net.var("B")
        child_premise = obs(cvar, "1")
        coparent = BeliefUpdate.uniform(bvar)
        factual = step_effect(and_net.cpt("C"), [child_premise, coparent], avar)
        trace = StepTrace(
            factor=_fac("C"),
            conclusion=_var("A"),
            premises=(_var("B"), _var("C")),
            effect=factual,
        )
        cf = _counterfactual_from_trace(
            and_net, trace, {"C": child_premise, "B": coparent}
        )
        assert np.allclose(cf.values, factual.values, atol=1e-12)

    def test_contradiction_branch(self):
        bn = _flip_network()
        evidence = {"C": "1", "B": "1"}
        ranked = find_maximal_proper_fas(bn, "A", evidence)
        joint = [
            r for r in ranked
            if {s.name for s in r.argument.sources} == {"B", "C"}
        ]
        assert joint, [r.argument.encoding() for r in ranked]
        r = joint[0]
        st = r.step_effects[-1]
        assert st.conclusion == _var("A")

        factual = st.effect
        cf = counterfactual_effect(bn, r.argument, _fac("C"), evidence)
        # independent evaluation of both updates via the dict-based recipe
        ref_factual = ref_step_effect(
            bn.cpt("C"),
            {"C": {("0",): 0.0, ("1",): 1.0}, "B": {("0",): 0.0, ("1",): 1.0}},
            bn.var("A"),
        )
        ref_cf = ref_step_effect(
            bn.cpt("C"),
            {"C": {("0",): 0.0, ("1",): 1.0}, "B": {("0",): 0.5, ("1",): 0.5}},
            bn.var("A"),
        )
        for s in ("0", "1"):
            assert factual.prob(s) == pytest.approx(ref_factual[(s,)], abs=1e-12)
            assert cf.prob(s) == pytest.approx(ref_cf[(s,)], abs=1e-12)
        assert cf.argued_state() != factual.argued_state()

        text = render(r, "contrastive", bn).text
        assert "instead." in text
        assert f"we infer that <A> = <{factual.argued_state()}> instead." in text

    def test_agreement_branch_uses_can(self, asia_module, fig1c_ranked):
        text = render(fig1c_ranked, "contrastive", asia_module).text
        assert "we can be strongly more certain" in text


class TestBaselineSummary:
    def test_changed(self):
        v = Variable("T", ("present", "absent"))
        prior = BeliefUpdate(v, [0.30, 0.70])
        post = BeliefUpdate(v, [0.70, 0.30])
        assert render_baseline_summary(prior, post) == (
            "The probability of <T> = <present> changed from 30% to 70%."
        )

    def test_remains(self):
        v = Variable("T", ("present", "absent"))
        prior = BeliefUpdate(v, [0.30, 0.70])
        assert render_baseline_summary(prior, prior) == (
            "The probability of <T> = <present> remains 30%."
        )

    def test_multistate_names_argued_state_only(self):
        v = Variable("T", ("a", "b", "c"))
        prior = BeliefUpdate(v, [0.2, 0.5, 0.3])
        post = BeliefUpdate(v, [0.6, 0.25, 0.15])
        text = render_baseline_summary(prior, post)
        assert text == "The probability of <T> = <a> changed from 20% to 60%."
        assert "<b>" not in text and "<c>" not in text

    def test_variable_mismatch(self):
        v1 = Variable("T", ("a", "b"))
        v2 = Variable("U", ("a", "b"))
        with pytest.raises(ValidationError):
            render_baseline_summary(BeliefUpdate(v1, [1, 1]), BeliefUpdate(v2, [1, 1]))
