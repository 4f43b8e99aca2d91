#include <doctest.h>

#include <cstdlib>
#include <regex>

#include "fixtures.hpp"
#include "loopback.hpp"
#include "infodensity/corpus/manifest.hpp"
#include "infodensity/error.hpp"
#include "infodensity/modeleval/modeleval.hpp"

using namespace infodensity;
using namespace infodensity::modeleval;

namespace {

corpus::Sample text_sample(const std::string& id, char gold = 'B') {
    corpus::Sample s;
    s.id = id;
    s.question = "Which fruit is shown?";
    s.options = {"apple", "banana", "cherry", "date"};
    s.answer = gold;
    return s;
}

ModelEndpoint endpoint(const std::string& name = "m") {
    ModelEndpoint e;
    e.name = name;
    e.base_url = "http://mock.invalid/v1";
    e.model_id = name + "-id";
    return e;
}

InferenceRecord rec(const std::string& id, std::optional<char> best, std::optional<char> alt = std::nullopt) {
    InferenceRecord r;
    r.sample_id = id;
    r.best = best;
    r.alternative = alt;
    return r;
}

Verdict verdict(const std::string& id, char gold, std::vector<std::pair<char, char>> runs) {
    std::vector<InferenceRecord> rs;
    for (auto [b, a] : runs) rs.push_back(rec(id, b, a));
    return verdict_from_runs(rs, gold);
}

} // namespace

TEST_CASE("best and alternative parsing") {
    auto p = parse_best_alt("Best: B\nAlternative: C", 4);
    CHECK(p.best == std::optional<char>('B'));
    CHECK(p.alternative == std::optional<char>('C'));
    p = parse_best_alt("best: d. alternative: a", 4);
    CHECK(p.best == std::optional<char>('D'));
    CHECK(p.alternative == std::optional<char>('A'));
    p = parse_best_alt("I think the picture is lovely.", 4);
    CHECK_FALSE(p.best);
    CHECK_FALSE(p.alternative);
    p = parse_best_alt("Best: E\nAlternative: A", 4);
    CHECK_FALSE(p.best);
    p = parse_best_alt("Best: (b)\nAlt: b", 2);
    CHECK(p.best == std::optional<char>('B'));
    CHECK_FALSE(p.alternative);
    CHECK(parse_best_alt("BEST OPTION = c", 3).best == std::optional<char>('C'));
}

TEST_CASE("prompts carry question, options and the format line") {
    const auto s = text_sample("x");
    const auto full = build_prompt(s, Condition::full);
    CHECK(full.find("Which fruit is shown?") != std::string::npos);
    CHECK(full.find("A. apple\nB. banana\nC. cherry\nD. date\n") != std::string::npos);
    CHECK(full.find("Best: <letter>") != std::string::npos);
    const auto blind = build_prompt(s, Condition::no_text);
    CHECK(blind.find(kNeutralInstruction) == 0);
    CHECK(blind.find("Which fruit") == std::string::npos);
    CHECK(build_prompt(s, Condition::full, 1).find("A. banana\n") != std::string::npos);
    CHECK(reask_prompt(4).find("between A and D") != std::string::npos);
    CHECK(condition_from_name(condition_name(Condition::no_text)) == Condition::no_text);
    CHECK_THROWS_AS(condition_from_name("half"), ValidationError);
}

TEST_CASE("query with re-ask and refusal") {
    const auto s = text_sample("x");
    const auto ep = endpoint();
    fixtures::ScriptedChat good([](const ChatRequest&) { return "Best: B\nAlternative: C"; });
    auto r = query_best_alt(s, good, ep, 11, Condition::no_image);
    CHECK(r.best == std::optional<char>('B'));
    CHECK(r.alternative == std::optional<char>('C'));
    CHECK(r.attempts == 1);
    CHECK(r.seed == 11);

    fixtures::ScriptedChat second([](const ChatRequest& req) {
        return req.messages.size() == 1 ? std::string("hmm") : std::string("Best: A");
    });
    r = query_best_alt(s, second, ep, 11, Condition::no_image);
    CHECK(r.attempts == 2);
    CHECK(r.best == std::optional<char>('A'));

    fixtures::ScriptedChat prose([](const ChatRequest&) { return "No idea at all."; });
    r = query_best_alt(s, prose, ep, 11, Condition::no_image);
    CHECK(r.refused());
    CHECK(prose.calls == 2);

    fixtures::ScriptedChat broken([](const ChatRequest&) -> std::string { throw ProviderError("down"); });
    r = query_best_alt(s, broken, ep, 11, Condition::no_image);
    CHECK(r.error);
    CHECK_FALSE(r.refused());
}

TEST_CASE("rotated options are mapped back to manifest labels") {
    const auto s = text_sample("x", 'C');
    const auto ep = endpoint();
    // Always chooses the letter shown next to "cherry".
    fixtures::ScriptedChat chooser([](const ChatRequest& req) {
        std::smatch m;
        const auto& text = req.messages[0].text;
        std::regex_search(text, m, std::regex("([A-D])\\. cherry"));
        return "Best: " + m[1].str();
    });
    std::vector<std::uint64_t> seeds{11, 22, 33, 44, 55};
    QueryOptions opts;
    opts.rotate_options = true;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto r = query_best_alt(s, chooser, ep, seeds[i], Condition::no_image, opts, i);
        CHECK(r.rotation == i % 4);
        CHECK(r.best == std::optional<char>('C'));
    }
    const auto v = circular_verdict(s, chooser, ep, Condition::no_image, seeds, opts);
    CHECK(v.correct);
}

TEST_CASE("circular verdicts") {
    CHECK(verdict("x", 'B', {{'B', 'C'}, {'B', 'C'}, {'B', 'A'}, {'B', 'C'}, {'B', 'D'}}).correct);
    CHECK_FALSE(verdict("x", 'B', {{'B', 'C'}, {'B', 'C'}, {'C', 'B'}, {'B', 'C'}, {'B', 'C'}}).correct);
    std::vector<InferenceRecord> rs(5, rec("x", 'B'));
    rs[3].best.reset();
    const auto v = verdict_from_runs(rs, 'B');
    CHECK_FALSE(v.correct);
    CHECK(v.refusal);
    CHECK_FALSE(verdict_from_runs({}, 'B').correct);

    const auto s = text_sample("x");
    std::size_t n = 0;
    fixtures::ScriptedChat always([&](const ChatRequest& req) {
        ++n;
        CHECK_FALSE(req.image);
        return "Best: B";
    });
    CHECK(circular_verdict(s, always, endpoint(), Condition::no_image).correct);
    CHECK(n == 5);
}

TEST_CASE("difficulty breakdown") {
    // Sample a: all correct unanimous. b: one correct (junior). c: none (junior, extreme).
    // d: two models swap best/alt (junior and ambiguity). e: identical pairs, unanimous.
    auto model = [&](char b_ans, char c_ans, std::pair<char, char> d_pair) {
        return std::vector<Verdict>{
            verdict("a", 'A', std::vector<std::pair<char, char>>(5, {'A', 'B'})),
            verdict("b", 'A', std::vector<std::pair<char, char>>(5, {b_ans, 'C'})),
            verdict("c", 'A', std::vector<std::pair<char, char>>(5, {c_ans, 'D'})),
            verdict("d", 'A', std::vector<std::pair<char, char>>(5, d_pair)),
            verdict("e", 'A', std::vector<std::pair<char, char>>(5, {'A', 'C'})),
        };
    };
    const std::vector<std::vector<Verdict>> per{model('A', 'B', {'A', 'B'}), model('B', 'C', {'B', 'A'}),
                                                model('C', 'B', {'B', 'A'})};
    const auto b = difficulty_breakdown(per);
    CHECK(b.p_junior == doctest::Approx(3.0 / 5));
    CHECK(b.p_extreme == doctest::Approx(1.0 / 5));
    CHECK(b.p_ambiguity == doctest::Approx(1.0 / 5));
    CHECK(b.p_overlap == doctest::Approx(1.0 / 5));
    CHECK(b.d_dif == doctest::Approx(b.p_junior + b.p_ambiguity));
    CHECK(b.samples[3].junior);
    CHECK(b.samples[3].ambiguity);
    CHECK_FALSE(b.samples[4].ambiguity);

    const auto loose = difficulty_breakdown(per, {.require_non_unanimous = false});
    CHECK(loose.samples[4].ambiguity);
    CHECK(loose.samples[0].ambiguity);

    const std::vector<std::vector<Verdict>> two{per[0], per[1]};
    CHECK_THROWS(difficulty_breakdown(two));

    const std::vector<std::vector<Verdict>> easy{model('A', 'A', {'A', 'B'}), model('A', 'A', {'A', 'B'}),
                                                 model('A', 'A', {'A', 'B'})};
    CHECK(difficulty_breakdown(easy).d_dif == 0.0);
}

TEST_CASE("difficulty sums reproduce published rows") {
    CHECK(0.362 + 0.184 == doctest::Approx(0.546));
    CHECK(0.516 + 0.150 == doctest::Approx(0.666));
}

TEST_CASE("redundancy accuracies") {
    auto many = [](std::size_t correct, std::size_t total) {
        std::vector<Verdict> v(total);
        for (std::size_t i = 0; i < correct; ++i) v[i].correct = true;
        return v;
    };
    const auto img = many(262, 1000), txt = many(104, 1000);
    auto r = redundancy_accuracies(img, std::span<const Verdict>(txt), {167.0, 23.24});
    CHECK(r.acc_no_image == doctest::Approx(0.262));
    CHECK(r.d_red == doctest::Approx(0.243).epsilon(5e-4));

    const auto pope = many(634, 1000);
    r = redundancy_accuracies(pope, std::nullopt, {167.0, 21.53});
    CHECK_FALSE(r.acc_no_text);
    CHECK(r.d_red == doctest::Approx(0.562).epsilon(5e-4));

    const auto none = many(0, 10);
    CHECK(redundancy_accuracies(none, std::span<const Verdict>(none), {167.0, 5.0}).d_red == 0.0);

    const auto a = redundancy_accuracies(img, std::span<const Verdict>(txt), {167.0, 23.24});
    const auto scaled = redundancy_accuracies(img, std::span<const Verdict>(txt), {334.0, 46.48});
    CHECK(a.d_red == doctest::Approx(scaled.d_red));
    CHECK(accuracy(many(3, 4)) == 0.75);
}

TEST_CASE("record log persists and replays") {
    fixtures::TempDir dir;
    const auto path = dir / "inference.jsonl";
    InferenceRecord r = rec("s1", 'B', 'C');
    r.model = "m";
    r.seed = 22;
    r.condition = Condition::no_text;
    r.raw = "Best: B\nAlternative: C";
    r.attempts = 1;
    {
        RecordLog log(path);
        log.append(r);
        auto r2 = r;
        r2.best.reset();
        r2.alternative.reset();
        r2.error = "timeout";
        r2.seed = 33;
        log.append(r2);
    }
    const auto back = RecordLog::load(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == r);
    CHECK(record_from_json(to_json(back[1])) == back[1]);

    RecordLog reopened(path);
    CHECK(reopened.records().size() == 2);
    CHECK(reopened.find("s1", "m", 22, Condition::no_text));
    CHECK_FALSE(reopened.find("s1", "m", 22, Condition::full));
}

TEST_CASE("run_condition reuses logged answers") {
    fixtures::TempDir dir;
    const auto a = text_sample("a"), b = text_sample("b", 'C');
    const std::vector<const corpus::Sample*> samples{&a, &b};
    auto ep = endpoint();
    ep.max_concurrency = 3;
    fixtures::ScriptedChat chat([](const ChatRequest&) { return "Best: B\nAlternative: A"; });
    RecordLog log(dir / "log.jsonl");
    const auto v1 = run_condition(samples, chat, ep, Condition::no_image, kDefaultSeeds, {}, &log);
    CHECK(chat.calls == 10);
    CHECK(v1[0].correct);
    CHECK_FALSE(v1[1].correct);

    RecordLog again(dir / "log.jsonl");
    const auto v2 = run_condition(samples, chat, ep, Condition::no_image, kDefaultSeeds, {}, &again);
    CHECK(chat.calls == 10);
    CHECK(v2[0].correct == v1[0].correct);

    const auto replay = verdicts_from_records(again.records(), samples, "m", Condition::no_image);
    CHECK(replay[0].correct);
    CHECK_FALSE(replay[1].correct);

    const std::array<std::uint64_t, 2> dup{1, 1};
    CHECK_THROWS_AS(run_condition(samples, chat, ep, Condition::no_image, dup), ValidationError);
}

TEST_CASE("chat request body shape") {
    ChatRequest req;
    req.model_id = "vlm";
    req.seed = 33;
    req.temperature = 0.5;
    req.messages = {{"user", "Q?"}, {"assistant", "hm"}, {"user", "again"}};
    req.image = std::string("\x89PNG", 4);
    const auto j = chat_request_body(req);
    CHECK(j["model"] == "vlm");
    CHECK(j["seed"] == 33);
    CHECK(j["messages"].size() == 3);
    CHECK(j["messages"][0]["content"][0]["text"] == "Q?");
    CHECK(j["messages"][0]["content"][1]["image_url"]["url"] == "data:image/png;base64,iVBORw==");
    CHECK(j["messages"][2]["content"] == "again");

    req.image.reset();
    CHECK(chat_request_body(req)["messages"][0]["content"] == "Q?");
}

TEST_CASE("endpoint config validation and json") {
    auto e = endpoint();
    CHECK(endpoint_from_json(to_json(e)).model_id == e.model_id);
    e.max_concurrency = 0;
    CHECK_THROWS_AS(e.validate(), ValidationError);
    e = endpoint();
    e.base_url.clear();
    CHECK_THROWS_AS(e.validate(), ValidationError);
}

TEST_CASE("http chat client against a loopback server") {
    fixtures::LoopbackServer srv;
    std::string auth;
    Json body;
    int failures_left = 1;
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        if (failures_left-- > 0) {
            res.status = 503;
            return;
        }
        auth = req.get_header_value("Authorization");
        body = Json::parse(req.body);
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"Best: D\nAlternative: B"}}]})",
                        "application/json");
    });
    srv.server.Post("/v2/chat/completions", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
    });
    srv.start();

    ::setenv("INFODENSITY_TEST_TOKEN", "sekret", 1);
    auto ep = endpoint("remote");
    ep.base_url = srv.url() + "/v1";
    ep.auth_env = "INFODENSITY_TEST_TOKEN";
    auto client = make_http_chat_client(ep);
    ChatRequest req;
    req.model_id = ep.model_id;
    req.messages = {{"user", "hello"}};
    CHECK(client->complete(req) == "Best: D\nAlternative: B");
    CHECK(auth == "Bearer sekret");
    CHECK(body["model"] == "remote-id");

    ep.base_url = srv.url() + "/v2";
    CHECK_THROWS_AS(make_http_chat_client(ep)->complete(req), ProviderError);

    ep.auth_env = "INFODENSITY_TEST_UNSET_VAR";
    ::unsetenv("INFODENSITY_TEST_UNSET_VAR");
    CHECK_THROWS_AS(make_http_chat_client(ep), ValidationError);
}
