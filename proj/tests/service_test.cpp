#include "mum/service.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <thread>

#include "mum/http.hpp"
#include "oracles.hpp"

namespace mum {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("mum-service-test-" + detail::random_id())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json numeric_request(std::int64_t m, std::vector<Heap> heaps, const std::string& opponent = "engine",
                     const std::string& policy = "stranded-only") {
  return {{"variant", {{"type", "numeric"}, {"modulus", m}}},
          {"heaps", heaps},
          {"opponent", opponent},
          {"policy", policy}};
}

json poly_request(std::int64_t p, int n, std::int64_t bits, std::vector<Heap> heaps,
                  const std::string& opponent = "engine", const std::string& policy = "stranded-only") {
  return {{"variant", {{"type", "poly"}, {"p", p}, {"n", n}, {"irreducible", bits}}},
          {"heaps", heaps},
          {"opponent", opponent},
          {"policy", policy}};
}

json reduce(std::size_t i, std::int64_t r) { return {{"move", {{"type", "reduce"}, {"heapIndex", i}, {"amount", r}}}}; }

std::string id_of(const json& view) { return view["session"]["id"].get<std::string>(); }

template <typename F>
ServiceError error_from(F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e;
  }
  ADD_FAILURE() << "no ServiceError";
  return ServiceError(0, "", "");
}

TEST(CreateSessionTest, Examples) {
  SessionService svc;
  const json v = svc.create(numeric_request(5, {6, 6, 6}));
  EXPECT_EQ(v["session"]["playerToMove"], "human");
  EXPECT_EQ(v["analysis"]["outcome"], "P");
  EXPECT_EQ(v["analysis"]["product"], 1);
  EXPECT_EQ(v["analysis"]["losingForPlayerToMove"], true);
  EXPECT_EQ(v["analysis"]["mumber"]["value"], 1);
  EXPECT_EQ(v["analysis"]["mumber"]["policy"], "stranded-only");
  EXPECT_FALSE(v["legalMoves"].empty());

  const json f = svc.create(poly_request(2, 3, 0b1011, {7, 6}));
  EXPECT_EQ(f["session"]["variant"]["irreduciblePolynomial"], "x^3+x+1");
  EXPECT_EQ(f["analysis"]["product"], 4);
  EXPECT_EQ(f["analysis"]["productText"], "x^2");
  EXPECT_TRUE(f["analysis"]["mumber"].is_null());
  EXPECT_TRUE(f["analysis"]["stateVector"].is_null());

  const json c = svc.create(numeric_request(15, {16, 16, 16}));
  EXPECT_EQ(c["analysis"]["stateVector"],
            json::parse(R"([{"modulus":3,"value":1},{"modulus":5,"value":1}])"));

  const auto e = error_from([&] { svc.create(numeric_request(5, {10})); });
  EXPECT_EQ(e.status(), 422);
  EXPECT_EQ(e.code(), "HeapNotCoprime");
  EXPECT_EQ(error_from([&] { svc.create(json{{"heaps", {2}}, {"variant", {{"type", "numeric"}}}}); }).status(), 400);
  EXPECT_EQ(error_from([&] { svc.create(poly_request(2, 3, 0b1001, {2})); }).code(), "NotIrreducible");
  EXPECT_EQ(error_from([&] { svc.create(numeric_request(5, {2}, "robot")); }).status(), 400);
}

TEST(PlayMoveTest, EngineRepliesToLosingStart) {
  SessionService svc;
  const std::string id = id_of(svc.create(numeric_request(5, {6, 6, 6})));
  const json v = svc.play(id, reduce(2, 4));
  ASSERT_EQ(v["applied"].size(), 2U);
  EXPECT_EQ(v["applied"][0]["heaps"], json::array({2, 6, 6}));
  EXPECT_EQ(v["applied"][1]["player"], "engine");
  EXPECT_EQ(v["session"]["heaps"], json::array({2, 3, 6}));
  EXPECT_EQ(v["analysis"]["product"], 1);
  EXPECT_EQ(v["session"]["playerToMove"], "human");
}

TEST(PlayMoveTest, FinishingMoveWins) {
  SessionService svc;
  const std::string id = id_of(svc.create(numeric_request(5, {2})));
  const json v = svc.play(id, reduce(0, 1));
  EXPECT_EQ(v["session"]["status"], "won");
  EXPECT_EQ(v["session"]["winner"], "human");
  EXPECT_TRUE(v["legalMoves"].empty());
  EXPECT_EQ(error_from([&] { svc.play(id, reduce(0, 1)); }).status(), 409);
  EXPECT_EQ(error_from([&] { svc.ai_move(id); }).status(), 409);
}

TEST(PlayMoveTest, Rejections) {
  SessionService svc;
  const std::string id = id_of(svc.create(numeric_request(5, {6, 6, 6})));
  const auto illegal = error_from([&] { svc.play(id, reduce(0, 7)); });
  EXPECT_EQ(illegal.status(), 422);
  EXPECT_EQ(illegal.code(), "IllegalMove");
  EXPECT_NE(std::string(illegal.what()).find("r < 5"), std::string::npos) << illegal.what();
  EXPECT_EQ(error_from([&] { svc.play(id, reduce(3, 1)); }).status(), 422);
  EXPECT_EQ(error_from([&] { svc.play(id, json{{"move", {{"type", "consolidate"}, {"amount", 1}}}}); }).status(), 422);

  json wrong_seat = reduce(0, 1);
  wrong_seat["player"] = "engine";
  const auto turn = error_from([&] { svc.play(id, wrong_seat); });
  EXPECT_EQ(turn.status(), 409);
  EXPECT_EQ(turn.code(), "NotYourTurn");

  EXPECT_EQ(error_from([&] { svc.play("nope", reduce(0, 1)); }).status(), 404);
  EXPECT_EQ(error_from([&] { svc.play(id, json{{"mvoe", 1}}); }).status(), 400);
  EXPECT_TRUE(svc.snapshot(id).history.empty());
}

TEST(HintTest, Examples) {
  SessionService svc;
  const json h = svc.hint(id_of(svc.create(numeric_request(5, {6, 6, 2}))));
  EXPECT_EQ(h["move"], (json{{"type", "reduce"}, {"heapIndex", 1}, {"amount", 3}}));
  EXPECT_EQ(h["coproduct"], 2);
  EXPECT_EQ(h["inverse"], 3);
  EXPECT_EQ(h["viaConsolidation"], false);

  const json lost = svc.hint(id_of(svc.create(numeric_request(5, {6, 6, 6}))));
  EXPECT_TRUE(lost["move"].is_null());
  EXPECT_NE(lost["explanation"].get<std::string>().find("every legal move leads to a winning position"),
            std::string::npos);

  const json stranded = svc.hint(id_of(svc.create(numeric_request(5, {2, 2, 2}))));
  EXPECT_EQ(stranded["move"], (json{{"type", "consolidate"}, {"amount", 2}}));
  EXPECT_EQ(stranded["viaConsolidation"], true);
  EXPECT_NE(stranded["explanation"].get<std::string>().find("consolidate"), std::string::npos);

  const json field = svc.hint(id_of(svc.create(poly_request(2, 3, 0b1011, {7, 7}))));
  EXPECT_EQ(field["fieldProduct"]["rep"], 3);
  EXPECT_EQ(field["fieldProductInverse"]["rep"], 6);
  EXPECT_FALSE(field["move"].is_null());
}

TEST(AnalysisTest, ScratchPreviewLeavesSessionAlone) {
  SessionService svc;
  const std::string id = id_of(svc.create(numeric_request(5, {6, 6, 2})));
  const json preview = svc.analysis(id, std::vector<Heap>{6, 3, 2});
  EXPECT_EQ(preview["outcome"], "P");
  EXPECT_EQ(preview["heaps"], json::array({2, 3, 6}));
  EXPECT_EQ(svc.analysis(id)["product"], 2);
  EXPECT_EQ(svc.snapshot(id).position.heaps(), (std::vector<Heap>{2, 6, 6}));
  EXPECT_EQ(error_from([&] { svc.analysis(id, std::vector<Heap>{5}); }).status(), 422);
}

TEST(AnalysisTest, FieldsMatchCoreOperations) {
  SessionService svc;
  auto gen = oracle::rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t m = std::vector<std::int64_t>{5, 7, 15, 21}[gen() % 4];
    std::vector<Heap> heaps;
    while (heaps.size() < 1 + gen() % 3) {
      const Heap h = 1 + static_cast<Heap>(gen() % 30);
      if (std::gcd(h, m) == 1) heaps.push_back(h);
    }
    const json a = svc.create(numeric_request(m, heaps, "engine", "always"))["analysis"];
    const NumPosition pos(Modulus(m), heaps);
    EXPECT_EQ(a["product"], product_mod(pos).value());
    EXPECT_EQ(a["outcome"], std::string(to_string(classify(pos))));
    EXPECT_EQ(a["stranded"], is_stranded(pos));
    if (!a["mumber"]["value"].is_null()) {
      EXPECT_EQ(a["mumber"]["value"], product_mod(pos).value());
    }
    EXPECT_EQ(a["hintAvailable"], classify(pos) == Outcome::NPosition);
  }
}

TEST(PersistenceTest, ReloadReproducesSessions) {
  TempDir dir;
  std::string id;
  std::string poly_id;
  json before;
  json poly_before;
  {
    SessionService svc(dir.path());
    id = id_of(svc.create(numeric_request(5, {6, 6, 6})));
    svc.play(id, reduce(2, 4));
    before = svc.get(id);
    poly_id = id_of(svc.create(poly_request(2, 3, 0b1011, {7, 6}, "human")));
    svc.ai_move(poly_id);
    poly_before = svc.get(poly_id);
  }
  SessionService reloaded(dir.path());
  EXPECT_EQ(reloaded.size(), 2U);
  EXPECT_EQ(reloaded.get(id), before);
  EXPECT_EQ(reloaded.get(poly_id), poly_before);
  EXPECT_NO_THROW(verify_history(reloaded.snapshot(id)));
  reloaded.play(id, reduce(0, 1));
  EXPECT_EQ(SessionService(dir.path()).get(id), reloaded.get(id));
}

TEST(PersistenceTest, CorruptFileFlagsOnlyThatSession) {
  TempDir dir;
  std::string id;
  {
    SessionService svc(dir.path());
    id = id_of(svc.create(numeric_request(7, {3, 4, 9})));
  }
  std::ofstream(dir.path() / "deadbeef.json") << "{\"id\": \"deadbeef\", \"heaps\": [";
  SessionService svc(dir.path());
  EXPECT_EQ(svc.size(), 1U);
  EXPECT_EQ(svc.unloadable().count("deadbeef"), 1U);
  EXPECT_EQ(svc.get(id)["session"]["heaps"], json::array({3, 4, 9}));
  const auto e = error_from([&] { svc.get("deadbeef"); });
  EXPECT_EQ(e.status(), 500);
  EXPECT_EQ(e.code(), "SessionUnloadable");
}

/// Random moves, legal or not: the service must accept exactly those in
/// legal_moves.
TEST(BoundaryTest, AcceptedMovesAreExactlyLegalMoves) {
  SessionService svc;
  auto gen = oracle::rng(99);
  int accepted = 0;
  int rejected = 0;
  for (int game = 0; game < 60; ++game) {
    const bool poly = game % 2 == 1;
    const std::string policy = game % 4 < 2 ? "stranded-only" : "always";
    json req;
    if (poly) {
      std::vector<Heap> heaps;
      for (std::size_t k = 0, n = 1 + gen() % 3; k < n; ++k) heaps.push_back(1 + static_cast<Heap>(gen() % 7));
      req = poly_request(2, 3, 0b1011, heaps, "human", policy);
    } else {
      std::vector<Heap> heaps;
      while (heaps.size() < 1 + gen() % 3) {
        const Heap h = 1 + static_cast<Heap>(gen() % 20);
        if (h % 5 != 0) heaps.push_back(h);
      }
      req = numeric_request(5, heaps, "human", policy);
    }
    const std::string id = id_of(svc.create(req));
    for (int step = 0; step < 40; ++step) {
      const GameSession s = svc.snapshot(id);
      if (s.status != SessionStatus::InProgress) break;
      const auto legal = s.position.legal_moves(s.policy);
      MoveAction mv = gen() % 4 == 0 ? MoveAction::consolidate(static_cast<std::int64_t>(gen() % 12) - 1)
                                     : MoveAction::reduce(gen() % 4, static_cast<std::int64_t>(gen() % 12) - 1);
      if (gen() % 3 == 0) mv = legal[gen() % legal.size()];
      const bool expected = std::find(legal.begin(), legal.end(), mv) != legal.end();
      try {
        svc.play(id, json{{"move", to_json(mv)}});
        EXPECT_TRUE(expected) << "accepted " << mv << " from " << to_json(s).dump();
        ++accepted;
      } catch (const ServiceError& e) {
        EXPECT_FALSE(expected) << "rejected legal " << mv << ": " << e.what();
        EXPECT_EQ(e.status(), 422);
        ++rejected;
      }
    }
  }
  EXPECT_GT(accepted, 100);
  EXPECT_GT(rejected, 100);
}

struct SelfPlayCase {
  std::string name;
  std::function<json(std::mt19937_64&)> request;
};

/// The side to move in an N-position must win engine-vs-engine play.
TEST(EngineSelfPlayTest, NPositionSideAlwaysWins) {
  auto numeric = [](std::int64_t m, const std::string& policy) {
    return [m, policy](std::mt19937_64& gen) {
      while (true) {
        std::vector<Heap> heaps;
        while (heaps.size() < 1 + gen() % 4) {
          const Heap h = 1 + static_cast<Heap>(gen() % static_cast<std::uint64_t>(3 * m));
          if (std::gcd(h, m) == 1) heaps.push_back(h);
        }
        if (classify(NumPosition(Modulus(m), heaps)) == Outcome::NPosition) {
          return numeric_request(m, heaps, "human", policy);
        }
      }
    };
  };
  auto field = [](int n, std::int64_t bits, const std::string& policy) {
    return [n, bits, policy](std::mt19937_64& gen) {
      const FieldSpec f = make_field_from_bits(2, n, bits);
      while (true) {
        std::vector<Heap> heaps;
        for (std::size_t k = 0, c = 1 + gen() % 4; k < c; ++k) {
          heaps.push_back(1 + static_cast<Heap>(gen() % static_cast<std::uint64_t>(f.order() - 1)));
        }
        if (classify_poly(PolyPosition(f, heaps)) == Outcome::NPosition) {
          return poly_request(2, n, bits, heaps, "human", policy);
        }
      }
    };
  };
  const std::vector<SelfPlayCase> cases = {
      {"mod 5 stranded-only", numeric(5, "stranded-only")}, {"mod 7 always", numeric(7, "always")},
      {"mod 15 stranded-only", numeric(15, "stranded-only")}, {"F(2^3) stranded-only", field(3, 0b1011, "stranded-only")},
      {"F(2^4) always", field(4, 0b10011, "always")},
  };
  SessionService svc;
  auto gen = oracle::rng(2024);
  for (const auto& c : cases) {
    for (int game = 0; game < 200; ++game) {
      const json req = c.request(gen);
      const std::string id = id_of(svc.create(req));
      for (int guard = 0; guard < 10'000 && svc.snapshot(id).status == SessionStatus::InProgress; ++guard) {
        svc.ai_move(id);
      }
      const GameSession end = svc.snapshot(id);
      ASSERT_EQ(end.status, SessionStatus::Won) << c.name;
      EXPECT_EQ(end.winner, "player1") << c.name << " from " << req["heaps"].dump();
      EXPECT_NO_THROW(verify_history(end));
    }
  }
}

TEST(ConcurrencyTest, MovesOnOneSessionApplyInOrder) {
  SessionService svc;
  const std::string id = id_of(svc.create(numeric_request(7, {40, 41, 43, 44}, "human", "always")));
  std::vector<std::thread> workers;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    workers.emplace_back([&] {
      for (int k = 0; k < 10; ++k) {
        try {
          svc.ai_move(id);
          ++ok;
        } catch (const ServiceError& e) {
          EXPECT_EQ(e.status(), 409);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  const GameSession s = svc.snapshot(id);
  EXPECT_EQ(static_cast<int>(s.history.size()), ok.load());
  EXPECT_NO_THROW(verify_history(s));
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    register_routes(server_, service_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  SessionService service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(HttpTest, SessionRoundTrip) {
  auto cli = client();
  auto created = cli.Post("/sessions", numeric_request(5, {6, 6, 2}).dump(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = id_of(json::parse(created->body));

  auto got = cli.Get("/sessions/" + id);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->status, 200);
  EXPECT_EQ(json::parse(got->body)["session"]["heaps"], json::array({2, 6, 6}));

  auto moves = cli.Get("/sessions/" + id + "/moves");
  ASSERT_TRUE(moves);
  EXPECT_EQ(json::parse(moves->body)["legalMoves"].size(),
            legal_moves(new_position(5, {6, 6, 2}), ConsolidationPolicy::StrandedOnly).size());

  auto hint = cli.Get("/sessions/" + id + "/hint");
  ASSERT_TRUE(hint);
  const json h = json::parse(hint->body);
  EXPECT_EQ(h["inverse"], 3);

  auto preview = cli.Get("/sessions/" + id + "/analysis?heaps=6,3,2");
  ASSERT_TRUE(preview);
  EXPECT_EQ(json::parse(preview->body)["outcome"], "P");

  auto played = cli.Post("/sessions/" + id + "/moves", json{{"move", h["move"]}}.dump(), "application/json");
  ASSERT_TRUE(played);
  EXPECT_EQ(played->status, 200);
  const json after = json::parse(played->body);
  EXPECT_EQ(after["applied"].size(), 2U);

  auto analysis = cli.Get("/sessions/" + id + "/analysis");
  ASSERT_TRUE(analysis);
  EXPECT_EQ(json::parse(analysis->body), after["analysis"]);

  auto ai = cli.Post("/sessions/" + id + "/ai-move", "", "application/json");
  ASSERT_TRUE(ai);
  EXPECT_EQ(ai->status, 200);
}

TEST_F(HttpTest, ErrorStatuses) {
  auto cli = client();
  auto missing = cli.Get("/sessions/unknown");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["error"], "NotFound");

  auto bad = cli.Post("/sessions", numeric_request(5, {10}).dump(), "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(json::parse(bad->body)["message"], "heap 10 not coprime to 5");

  auto garbage = cli.Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);

  auto created = cli.Post("/sessions", numeric_request(5, {6, 6, 6}).dump(), "application/json");
  const std::string id = id_of(json::parse(created->body));
  auto illegal = cli.Post("/sessions/" + id + "/moves", reduce(0, 7).dump(), "application/json");
  ASSERT_TRUE(illegal);
  EXPECT_EQ(illegal->status, 422);
  json wrong = reduce(0, 1);
  wrong["player"] = "engine";
  auto turn = cli.Post("/sessions/" + id + "/moves", wrong.dump(), "application/json");
  ASSERT_TRUE(turn);
  EXPECT_EQ(turn->status, 409);
  auto bad_preview = cli.Get("/sessions/" + id + "/analysis?heaps=6,x");
  ASSERT_TRUE(bad_preview);
  EXPECT_EQ(bad_preview->status, 400);
}

}  // namespace
}  // namespace mum
