// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "helpers.hpp"
#include "pforge/datagen.hpp"
#include "pforge/errors.hpp"

using namespace pforge;
using testutil::sample;

namespace {

Dialogue sample_dialogue() {
    Dialogue d;
    d.dialogue_id = "corporate-finance-and-investing-00001";
    d.domain = "corporate-finance-and-investing";
    d.teacher = "teacher";
    d.turn1 = testutil::sample_request();
    d.turn2 = validate_intent_analysis(sample("turn2.json"));
    d.turn3 = validate_optimization_report(sample("turn3.json"));
    d.turn4 = validate_optimized_prompt(sample("turn4.json"));
    return d;
}

std::string filter_reply(int quality, int alignment) {
    return Json{{"quality", quality}, {"alignment", alignment}, {"rationale", "r"}}.dump();
}

DatasetConfig small_config(std::vector<std::string> domains, int target, int test) {
    DatasetConfig c;
    c.per_domain_target = target;
    c.per_domain_test = test;
    c.teacher_plan = {{"mock", 1.0}};
    c.domains = std::move(domains);
    c.workers = 2;
    return c;
}

std::map<std::string, Gateway> mock_teachers() {
    std::map<std::string, Gateway> t;
    t.emplace("mock", Gateway(std::make_shared<TemplateMockBackend>()));
    return t;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("simulated intents are seeded and carry at most three preferences") {
    Gateway g(std::make_shared<TemplateMockBackend>());
    const auto& domain = DomainRegistry::builtin().at("travel-and-tourism");
    const auto a = simulate_intent(g, TemplateSet::defaults(), domain, IntentStyle::Detailed, 11);
    const auto b = simulate_intent(g, TemplateSet::defaults(), domain, IntentStyle::Detailed, 11);
    CHECK(a == b);
    CHECK(a.preferences.size() <= 3);
    CHECK(a.domain_hint == std::optional<std::string>("travel-and-tourism"));
    CHECK(g.ledger().count("intent_sim") == 2);
}

TEST_CASE("generated dialogues use four teacher calls") {
    TeacherBackend teacher{"mock", Gateway(std::make_shared<TemplateMockBackend>())};
    const auto& domain = DomainRegistry::builtin().at("health-and-medicine");
    const auto d = generate_dialogue(domain, IntentStyle::Underspecified, teacher, TemplateSet::defaults(), 3, "health-and-medicine-00001");
    CHECK(d.dialogue_id == "health-and-medicine-00001");
    CHECK(d.teacher == "mock");
    CHECK(d.intent_style == IntentStyle::Underspecified);
    CHECK(teacher.gateway.ledger().size() == 4);
    CHECK(d.turn3.optimization_suggestions.size() == 5);
}

TEST_CASE("filter keeps only when both scores reach the threshold") {
    const auto d = sample_dialogue();
    auto run = [&](const std::string& reply) {
        auto b = std::make_shared<ScriptedMockBackend>();
        b->push_purpose("filter", reply);
        Gateway g(b);
        return filter_dialogue(d, g, TemplateSet::defaults());
    };
    CHECK(run(filter_reply(6, 6)).keep);
    const auto low_q = run(filter_reply(5, 9));
    CHECK_FALSE(low_q.keep);
    CHECK(low_q.reason == "quality 5 < 6");
    CHECK(run(filter_reply(9, 4)).reason == "alignment 4 < 6");
    CHECK_THROWS_AS(run(filter_reply(11, 6)), Error);
}

TEST_CASE("a discarded dialogue is followed by a replacement") {
    auto judge_backend = std::make_shared<ScriptedMockBackend>();
    judge_backend->push_purpose("filter", filter_reply(3, 8));
    judge_backend->push_purpose("filter", filter_reply(8, 8));
    Gateway judge(judge_backend);
    auto teachers = mock_teachers();
    auto cfg = small_config({"health-and-medicine"}, 3, 1);
    const auto r = build_dataset(cfg, teachers, judge, TemplateSet::defaults());

    REQUIRE(r.manifest.records.size() == 4);
    CHECK(r.manifest.records[0].filter_status == FilterStatus::Discarded);
    CHECK(r.manifest.records[0].filter_reason == "quality 3 < 6");
    CHECK(r.manifest.records[0].split == Split::None);
    CHECK(r.manifest.records[1].filter_status == FilterStatus::Replacement);
    CHECK(r.manifest.records[2].filter_status == FilterStatus::Kept);
    CHECK(r.manifest.by_domain.at("health-and-medicine") == DomainCounts{4, 3, 1, 0});
    CHECK(r.dialogues.size() == 3);
    CHECK(r.manifest.count(Split::Test) == 1);
    CHECK(r.manifest.count(Split::Train) == 2);
}

TEST_CASE("judge outages are re-judged, not regenerated") {
    auto judge_backend = std::make_shared<ScriptedMockBackend>();
    for (int i = 0; i < 3; ++i) judge_backend->push_purpose("filter", BackendReply{503, "busy"});
    judge_backend->push_purpose("filter", filter_reply(8, 8));
    Gateway judge(judge_backend, testutil::fast_options());
    auto teachers = mock_teachers();
    const auto r = build_dataset(small_config({"health-and-medicine"}, 2, 0), teachers, judge, TemplateSet::defaults());
    CHECK(r.manifest.by_domain.at("health-and-medicine") == DomainCounts{2, 2, 0, 0});
    CHECK(r.manifest.records[0].dialogue_id == "health-and-medicine-00001");
}

TEST_CASE("a domain that cannot reach its target is reported") {
    auto judge_backend = std::make_shared<ScriptedMockBackend>();
    judge_backend->push_purpose("filter", filter_reply(2, 2));
    Gateway judge(judge_backend);
    auto teachers = mock_teachers();
    auto cfg = small_config({"health-and-medicine"}, 2, 0);
    cfg.max_attempts_per_domain = 4;
    try {
        build_dataset(cfg, teachers, judge, TemplateSet::defaults());
        FAIL("expected GenerationExhausted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GenerationExhausted);
        CHECK(std::string(e.what()).find("0 of 2") != std::string::npos);
    }
}

TEST_CASE("dataset counts are conserved and runs are deterministic") {
    Gateway judge(std::make_shared<TemplateMockBackend>());
    auto teachers = mock_teachers();
    auto cfg = small_config({"health-and-medicine", "law-and-legal-literacy", "travel-and-tourism"}, 4, 1);
    const auto a = build_dataset(cfg, teachers, judge, TemplateSet::defaults());
    cfg.workers = 1;
    const auto b = build_dataset(cfg, teachers, judge, TemplateSet::defaults());
    CHECK(a.manifest == b.manifest);
    CHECK(a.manifest.kept() == 12);
    CHECK(a.manifest.count(Split::Test) == 3);
    CHECK(a.manifest.count(Split::Train) == 9);
    for (const auto& [id, c] : a.manifest.by_domain) {
        CHECK(c.attempted == c.kept + c.discarded + c.abandoned);
    }
    CHECK(a.manifest.kept_by_teacher.at("mock") == 12);
    cfg.seed = 43;
    const auto c = build_dataset(cfg, teachers, judge, TemplateSet::defaults());
    CHECK(to_json(c.dialogues[0]) != to_json(a.dialogues[0]));

    const auto dir = testutil::scratch("dataset_write");
    write_dataset(a, dir);
    const auto summary = Json::parse(testutil::read_file(dir / "summary.json"));
    CHECK(summary["kept"] == 12);
    CHECK(summary["by_domain"]["health-and-medicine"]["attempted"] == 4);
}

TEST_CASE("dataset config validation") {
    auto cfg = small_config({}, 2, 3);
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.per_domain_test = 1;
    CHECK_NOTHROW(cfg.validate());
    cfg.domains = {"astrology"};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.domains.clear();
    cfg.teacher_plan.clear();
    CHECK_THROWS_AS(cfg.validate(), Error);

    const auto plan = default_teacher_plan("big", {"x", "y"});
    CHECK(plan.at("big") == doctest::Approx(2.0 / 3.0));
    CHECK(plan.at("x") == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("chat export matches independently built references") {
    const auto templates = TemplateSet::defaults();
    const auto d = sample_dialogue();
    for (const std::string name : {"llama3", "plain"}) {
        const auto tmpl = ChatTemplate::load(templates, name);
        const auto text = export_chat_format(d, tmpl, templates);
        CHECK(text == testutil::read_file(testutil::data_path("golden/financial_report_" + name + ".txt")));
        const auto parsed = parse_chat_export(text, tmpl);
        CHECK(parsed == dialogue_messages(d, templates));
        REQUIRE(parsed.size() == 6);
        CHECK(validate_optimized_prompt(parsed[5].content) == d.turn4);
    }
}

TEST_CASE("chat templates reject malformed patterns") {
    CHECK_THROWS_AS(ChatTemplate::from_json(Json{{"name", "x"}, {"message", "{content}{role}"}}), Error);
    CHECK_THROWS_AS(ChatTemplate::from_json(Json{{"name", "x"}, {"message", "{role}: {content} {extra}"}}), Error);
    const auto t = ChatTemplate::from_json(Json{{"name", "x"}, {"message", "[{role}] {content}"}, {"separator", "\n"}});
    const std::vector<ChatMessage> msgs{{Role::User, "a [assistant] b"}, {Role::Assistant, "c"}};
    CHECK(parse_chat_export(render_chat(msgs, t), t) == msgs);
}

TEST_CASE("training configuration export") {
    const auto j = export_training_config();
    CHECK(j["per_device_batch"] == 8);
    CHECK(j["grad_accum"] == 4);
    CHECK(j["total_batch"] == 32);
    CHECK(j["optimizer"] == "adamw-8bit");
    CHECK(j["lr"].get<double>() == 4e-5);
    CHECK(j["scheduler"] == "constant_with_warmup");
    CHECK(j["lora_rank"] == 32);
    CHECK(j["lora_alpha"] == 64);
    CHECK(j["epochs"] == 2);

    TrainingConfig c;
    c.apply_overrides(Json{{"grad_accum", 8}, {"lr", 1e-4}});
    CHECK(export_training_config(c)["total_batch"] == 64);
    try {
        c.apply_overrides(Json{{"learning_rate", 1e-4}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field_path() == "training.learning_rate");
    }
}

}  // TEST_SUITE
