#include <doctest.h>

#include <algorithm>
#include <set>

#include "files.hpp"
#include "qfm/configurator.hpp"
#include "random_model.hpp"

using namespace qfm;
using namespace qfm::config;
using qfm::testing::load_example;
using qfm::testing::parse_text;

namespace {

std::set<std::string> names(const FeatureModel& m, const std::vector<Literal>& lits,
                            const PrunedProblem& p) {
  std::set<std::string> out;
  for (Literal l : lits) {
    const Variable& v = p.base.variable(l.var);
    if (v.kind == VariableKind::Selected) out.insert(m.feature(v.feature).name);
  }
  return out;
}

std::vector<std::string> selection(const FeatureModel& m, const Configuration& c) {
  std::vector<std::string> out;
  for (FeatureId f : c.selected) out.push_back(m.feature(f).name);
  return out;
}

}  // namespace

TEST_CASE("a lone root yields only the root unit clause") {
  auto m = parse_text("model M { feature Root }");
  auto cs = derive_constraints(m);
  REQUIRE(cs.clauses().size() == 1);
  CHECK(cs.clauses()[0].rule == ClauseRule::Root);
  CHECK(cs.clauses()[0].literals == std::vector<Literal>{{0, true}});
  CHECK(cs.forced_true().empty());
  CHECK(cs.forced_false().empty());
}

TEST_CASE("alt group encodes at-least-one plus pairwise exclusion") {
  auto m = parse_text(R"(model M { abstract feature R { group alt { feature A feature B feature C } } })");
  auto cs = derive_constraints(m);
  std::size_t at_least = 0, at_most = 0;
  for (const auto& c : cs.clauses()) {
    if (c.rule == ClauseRule::AltAtLeastOne) {
      ++at_least;
      CHECK(c.literals.size() == 4);
    }
    if (c.rule == ClauseRule::AltAtMostOne) ++at_most;
  }
  CHECK(at_least == 1);
  CHECK(at_most == 3);
}

TEST_CASE("requiring an attribute value also requires its owner") {
  auto m = parse_text(R"(model M { abstract feature R {
      feature D { attribute L in { a, b } }
      feature S
    }
    S requires D.L = a })");
  auto cs = derive_constraints(m);
  std::vector<const Clause*> requires_clauses;
  for (const auto& c : cs.clauses()) {
    if (c.rule == ClauseRule::Requires) requires_clauses.push_back(&c);
  }
  REQUIRE(requires_clauses.size() == 2);
  CHECK(cs.describe(requires_clauses[0]->literals[1]) == "binding(D.L = a)");
  CHECK(cs.describe(requires_clauses[1]->literals[1]) == "selected(D)");
  CHECK(cs.describe(~requires_clauses[1]->literals[1]) == "not selected(D)");
}

TEST_CASE("classification requirement forces the expected literals") {
  auto m = load_example("classification.qfm");
  auto p = apply_requirement(m, *m.requirement());

  std::map<std::string, ReasonCode> excluded;
  for (Literal l : p.base.forced_false()) {
    excluded[m.feature(p.base.variable(l.var).feature).name] = p.reason(l)->code;
  }
  CHECK(excluded == std::map<std::string, ReasonCode>{
                        {"Reweighing", ReasonCode::ConstraintConflict},
                        {"DIR", ReasonCode::ConstraintConflict},
                        {"EO", ReasonCode::UnrequestedMetric},
                        {"Precision", ReasonCode::UnrequestedMetric},
                        {"Recall", ReasonCode::UnrequestedMetric},
                    });

  CHECK(names(m, p.base.forced_true(), p) ==
        std::set<std::string>{"ML Pipeline", "Dataset", "Fairness", "DI", "SP", "Accuracy",
                              "Zero One Loss"});
  const Literal root = p.base.selected_literal(m.root());
  CHECK(p.reason(root)->code == ReasonCode::MandatoryRoot);
  const Literal fairness = p.base.selected_literal(*m.find_feature("Fairness"));
  CHECK(p.reason(fairness)->code == ReasonCode::QualityImplementer);

  // The conflict is explained by the requirement's binding.
  const Literal dir = p.base.selected_literal(*m.find_feature("DIR"), false);
  REQUIRE(p.reason(dir)->antecedents.size() == 1);
  CHECK(p.reason(p.reason(dir)->antecedents[0])->code == ReasonCode::AttrSpec);
}

TEST_CASE("a quality required without thresholds still forces its implementers") {
  auto m = parse_text(R"(model M { abstract feature R {
      abstract feature Fix { group alt { feature A feature B } }
    }
    quality fairness Q { implemented_by Fix }
    requirement t { require Q } })");
  auto p = apply_requirement(m, *m.requirement());
  CHECK(p.base.is_forced(p.base.selected_literal(*m.find_feature("Fix"))));
  CHECK(count_configurations(p) == 2);
}

TEST_CASE("involvements never force anything") {
  auto m = parse_text(R"(model M { abstract feature R { feature A feature B }
    quality interpretability I { involves A level high, B level low }
    requirement t { require I { level high } } })");
  auto p = apply_requirement(m, *m.requirement());
  CHECK(p.base.forced_true().size() == 1);
  CHECK(p.base.forced_false().empty());
  CHECK(count_configurations(p) == 4);
}

TEST_CASE("forcing a literal both ways reports two provenance chains") {
  auto m = load_example("unsatisfiable.qfm");
  try {
    apply_requirement(m, *m.requirement());
    FAIL("expected RequirementUnsatisfiable");
  } catch (const RequirementUnsatisfiable& e) {
    CHECK(e.literal() == "selected(Adversarial Debiasing)");
    REQUIRE(!e.positive_chain().empty());
    REQUIRE(e.negative_chain().size() == 2);
    CHECK(e.positive_chain()[0].reason == "QUALITY_IMPLEMENTER");
    CHECK(e.negative_chain()[0].reason == "CONSTRAINT_CONFLICT");
    CHECK(e.negative_chain()[1].reason == "ATTR_SPEC");
    std::string first = e.render();
    try {
      apply_requirement(m, *m.requirement());
    } catch (const RequirementUnsatisfiable& again) {
      CHECK(again.render() == first);
    }
  }
}

TEST_CASE("a conflict found by propagation is explained through clauses") {
  auto m = parse_text(R"(model M { abstract feature R { feature A feature B }
    A excludes B
    quality fairness Q { implemented_by A }
    quality privacy P { implemented_by B }
    requirement t { require Q require P } })");
  try {
    apply_requirement(m, *m.requirement());
    FAIL("expected RequirementUnsatisfiable");
  } catch (const RequirementUnsatisfiable& e) {
    const auto& pos = e.positive_chain();
    const auto& neg = e.negative_chain();
    REQUIRE(!pos.empty());
    REQUIRE(!neg.empty());
    auto mentions = [](const std::vector<ChainStep>& chain, const std::string& reason) {
      return std::any_of(chain.begin(), chain.end(),
                         [&](const ChainStep& s) { return s.reason == reason; });
    };
    CHECK((mentions(pos, "EXCLUDES") || mentions(neg, "EXCLUDES")));
    CHECK(mentions(pos, "QUALITY_IMPLEMENTER"));
    CHECK(mentions(neg, "QUALITY_IMPLEMENTER"));
  }
}

TEST_CASE("provenance is total over forced literals") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto m = qfm::testing::random_model(seed);
    try {
      auto p = apply_requirement(m, *m.requirement());
      for (Literal l : p.base.forced_true()) CHECK(p.reason(l) != nullptr);
      for (Literal l : p.base.forced_false()) CHECK(p.reason(l) != nullptr);
      CHECK(p.provenance.size() == p.base.forced_true().size() + p.base.forced_false().size());
    } catch (const RequirementUnsatisfiable&) {
    }
  }
}

TEST_CASE("enumeration equals the exhaustive oracle on random models") {
  std::size_t compared = 0, unsatisfiable = 0;
  for (std::uint64_t seed = 0; seed < 250; ++seed) {
    auto m = qfm::testing::random_model(seed);
    CAPTURE(seed);
    auto plain = unconstrained_problem(m);
    CHECK(enumerate_configurations(plain).configurations == brute_force_enumerate(plain));
    try {
      auto p = apply_requirement(m, *m.requirement());
      CHECK(enumerate_configurations(p).configurations == brute_force_enumerate(p));
      ++compared;
    } catch (const RequirementUnsatisfiable&) {
      std::size_t valid = 0;
      for_each_valid_selection(m, m.requirement(), [&](const std::vector<bool>&) { ++valid; });
      CHECK(valid == 0);
      ++unsatisfiable;
    }
  }
  CHECK(compared > 100);
  MESSAGE(compared << " satisfiable, " << unsatisfiable << " unsatisfiable requirements");
}

TEST_CASE("n optional leaves give 2^n configurations") {
  for (std::size_t n = 0; n <= 10; ++n) {
    auto m = build_model(qfm::testing::flat_optional_decl(n));
    auto p = unconstrained_problem(m);
    CHECK(count_configurations(p) == (std::uint64_t{1} << n));
    CHECK(enumerate_configurations(p).configurations.size() == (std::size_t{1} << n));
  }
}

TEST_CASE("a requirement only removes configurations") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto m = qfm::testing::random_model(seed);
    auto plain = enumerate_configurations(unconstrained_problem(m)).configurations;
    try {
      auto pruned = enumerate_configurations(apply_requirement(m, *m.requirement())).configurations;
      for (const auto& c : pruned) {
        bool found = std::any_of(plain.begin(), plain.end(),
                                 [&](const Configuration& d) { return d.selected == c.selected; });
        CHECK(found);
        CHECK(verify_configuration(m, std::nullopt, c).empty());
      }
    } catch (const RequirementUnsatisfiable&) {
    }
  }
}

TEST_CASE("output is sorted, duplicate free, deterministic and matches the count") {
  for (std::uint64_t seed = 300; seed < 360; ++seed) {
    auto m = qfm::testing::random_model(seed);
    auto p = unconstrained_problem(m);
    auto first = enumerate_configurations(p).configurations;
    CHECK(first == enumerate_configurations(p).configurations);
    CHECK(count_configurations(p) == first.size());
    for (std::size_t i = 1; i < first.size(); ++i) {
      CHECK(configuration_less(m, first[i - 1], first[i]));
      CHECK_FALSE(configuration_less(m, first[i], first[i - 1]));
    }
  }
}

TEST_CASE("every emitted configuration verifies") {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto m = qfm::testing::random_model(seed);
    try {
      auto p = apply_requirement(m, *m.requirement());
      for (const auto& c : enumerate_configurations(p).configurations) {
        CHECK(verify_configuration(m, m.requirement(), c).empty());
      }
    } catch (const RequirementUnsatisfiable&) {
    }
  }
}

TEST_CASE("limit truncates and reports it") {
  auto m = load_example("classification.qfm");
  auto p = apply_requirement(m, *m.requirement());
  auto three = enumerate_configurations(p, 3);
  CHECK(three.truncated);
  CHECK(three.configurations.size() == 3);
  auto all = enumerate_configurations(p, 8);
  CHECK_FALSE(all.truncated);
  CHECK(all.configurations.size() == 8);
  auto none = enumerate_configurations(p, 0);
  CHECK(none.truncated);
  CHECK(none.configurations.empty());
}

TEST_CASE("bindings carry the requirement's values") {
  auto m = load_example("classification.qfm");
  auto p = apply_requirement(m, *m.requirement());
  auto configs = enumerate_configurations(p).configurations;
  REQUIRE(!configs.empty());
  for (const auto& c : configs) {
    REQUIRE(c.bindings.size() == 2);
    CHECK(m.describe(c.bindings[0]) == "Dataset.Label = multi-class");
    CHECK(m.describe(c.bindings[1]) == "Dataset.SensitiveVars = multiple");
  }
}

TEST_CASE("selected features contribute the values they require") {
  auto m = load_example("child_features.qfm");
  auto p = unconstrained_problem(m);
  for (const auto& c : enumerate_configurations(p).configurations) {
    const bool child1 = c.contains(*m.find_feature("Child1"));
    CHECK(c.bindings.size() == (child1 ? 1u : 0u));
  }
}

TEST_CASE("hidden and abstract features are never listed") {
  auto m = load_example("hidden_features.qfm");
  auto p = apply_requirement(m, *m.requirement());
  auto configs = enumerate_configurations(p).configurations;
  CHECK(configs.size() == 4);
  for (const auto& c : configs) {
    for (FeatureId f : c.selected) CHECK(m.feature(f).is_visible());
  }
  CHECK(selection(m, configs.front()) ==
        std::vector<std::string>{"Ingestion", "Autoencoder"});
}

TEST_CASE("verify rejects unlisted kinds of features") {
  auto m = load_example("classification.qfm");
  Configuration c;
  c.selected = {*m.find_feature("Classifier")};
  auto v = verify_configuration(m, std::nullopt, c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "NOT_VISIBLE");
  c.selected = {FeatureId{999}};
  v = verify_configuration(m, std::nullopt, c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].rule == "UNKNOWN_FEATURE");
}

TEST_CASE("verify names the broken rule") {
  auto m = load_example("classification.qfm");
  auto p = apply_requirement(m, *m.requirement());
  auto good = enumerate_configurations(p).configurations.front();
  auto with = [&](const char* name) {
    Configuration c = good;
    c.selected.push_back(*m.find_feature(name));
    std::sort(c.selected.begin(), c.selected.end());
    return verify_configuration(m, m.requirement(), c);
  };
  auto rules = [](const std::vector<Violation>& v) {
    std::set<std::string> out;
    for (const auto& x : v) out.insert(x.rule);
    return out;
  };
  CHECK(rules(with("EO")).count("UNREQUESTED_METRIC") == 1);
  CHECK(rules(with("KNN")).count("ALT_GROUP") == 1);
  auto reweighing = rules(with("Reweighing"));
  CHECK(reweighing.count("CONSTRAINT_CONFLICT") == 1);
}

TEST_CASE("check_selection covers the tree rules") {
  auto m = parse_text(R"(model M { abstract feature R {
      mandatory feature Must
      feature Opt { attribute L in { a, b } }
      feature X
      feature Y
      abstract feature Ors { group or { feature O1 feature O2 } }
      abstract feature Alts { group alt { feature A1 feature A2 } }
    }
    X requires Y
    Y excludes O1
    X requires Opt.L = a
    Y requires Opt.L = b })");
  auto rules_for = [&](std::vector<std::string> picked) {
    std::vector<bool> sel(m.feature_count(), false);
    for (const auto& n : picked) sel[m.find_feature(n)->value] = true;
    std::set<std::string> out;
    for (const auto& v : check_selection(m, std::nullopt, sel)) out.insert(v.rule);
    return out;
  };
  CHECK(rules_for({"R", "Must"}).empty());
  CHECK(rules_for({"Must"}).count("ROOT"));
  CHECK(rules_for({"R"}).count("MANDATORY"));
  CHECK(rules_for({"R", "Must", "O1"}).count("PARENT"));
  CHECK(rules_for({"R", "Must", "Ors"}).count("OR_GROUP"));
  CHECK(rules_for({"R", "Must", "Alts", "A1", "A2"}).count("ALT_GROUP"));
  CHECK(rules_for({"R", "Must", "Alts"}).count("ALT_GROUP"));
  CHECK(rules_for({"R", "Must", "X", "Opt"}).count("REQUIRES"));
  CHECK(rules_for({"R", "Must", "Y", "Ors", "O1"}).count("EXCLUDES"));
  CHECK(rules_for({"R", "Must", "X", "Y", "Opt"}).count("BINDING_CONFLICT"));
}

TEST_CASE("the exhaustive oracle refuses large models") {
  auto m = load_example("desk_scale.qfm");
  CHECK_THROWS_AS(brute_force_enumerate(unconstrained_problem(m)), TooLarge);
  CHECK(count_configurations(unconstrained_problem(m)) == 10240);
}
