#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "support/temp_dir.hpp"
#include "woodleaf/error.hpp"
#include "woodleaf/eval.hpp"
#include "woodleaf/rng.hpp"

using namespace woodleaf;
using testsupport::TempDir;

TEST_CASE("confusion: labeled examples") {
    const ConfusionMatrix cm = confusion({Label::Leaf, Label::Wood}, {Label::Leaf, Label::Wood});
    CHECK(cm.tp == 1);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);

    const ConfusionMatrix all_fp =
        confusion(LabelVector(5, Label::Leaf), LabelVector(5, Label::Wood));
    CHECK(all_fp.fp == 5);
    CHECK(all_fp.tp + all_fp.tn + all_fp.fn == 0);
}

TEST_CASE("confusion: random tally matches an independent counting pass") {
    Rng rng(5);
    LabelVector pred, truth;
    for (int i = 0; i < 1000; ++i) {
        pred.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
        truth.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
    }
    const ConfusionMatrix cm = confusion(pred, truth);
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    for (int i = 0; i < 1000; ++i) {
        tp += pred[i] == Label::Leaf && truth[i] == Label::Leaf;
        tn += pred[i] == Label::Wood && truth[i] == Label::Wood;
        fp += pred[i] == Label::Leaf && truth[i] == Label::Wood;
        fn += pred[i] == Label::Wood && truth[i] == Label::Leaf;
    }
    CHECK(cm.tp == tp);
    CHECK(cm.tn == tn);
    CHECK(cm.fp == fp);
    CHECK(cm.fn == fn);
    CHECK(cm.total() == 1000);
}

TEST_CASE("confusion: length mismatch rejected") {
    CHECK_THROWS_AS(confusion(LabelVector(3, Label::Leaf), LabelVector(4, Label::Leaf)),
                    ConfigError);
}

TEST_CASE("overall accuracy: reference values") {
    CHECK(overall_accuracy({50, 50, 0, 0}) == 1.0);
    CHECK(overall_accuracy({40, 40, 10, 10}) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(overall_accuracy({0, 0, 30, 70}) == 0.0);
}

TEST_CASE("kappa: perfect classification is exactly 1 under both variants") {
    for (const ConfusionMatrix cm : {ConfusionMatrix{50, 50, 0, 0}, ConfusionMatrix{99, 1, 0, 0}}) {
        CHECK(kappa(cm, KappaVariant::Paper) == 1.0);
        CHECK(kappa(cm, KappaVariant::Standard) == 1.0);
    }
}

TEST_CASE("kappa: all-leaf prediction on balanced truth scores 0") {
    const ConfusionMatrix cm{50, 0, 50, 0};
    CHECK(kappa(cm, KappaVariant::Paper) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(kappa(cm, KappaVariant::Standard) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("kappa: symmetric matrix 40/40/10/10 gives 0.6 under both variants") {
    const ConfusionMatrix cm{40, 40, 10, 10};
    CHECK(kappa(cm, KappaVariant::Paper) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(kappa(cm, KappaVariant::Standard) == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("kappa: degenerate p_e = 1 rule") {
    // every point is leaf and predicted leaf: p_e = 1, p_o = 1 -> 1
    CHECK(kappa({10, 0, 0, 0}, KappaVariant::Paper) == 1.0);
    CHECK(kappa({10, 0, 0, 0}, KappaVariant::Standard) == 1.0);
    // TN-only mass degenerates only under the standard form (the paper
    // variant's expectation has no TN x TN term); both still score 1
    CHECK(kappa({0, 10, 0, 0}, KappaVariant::Standard) == 1.0);
    CHECK(kappa({0, 10, 0, 0}, KappaVariant::Paper) == 1.0);
    // p_e = 1 with imperfect accuracy -> 0: all predicted leaf, all truth leaf
    // except none right is impossible; use all-FN mass instead
    CHECK(kappa({0, 0, 0, 10}, KappaVariant::Paper) == 0.0);
}

TEST_CASE("kappa: class swap keeps the standard variant, moves the paper one") {
    // hand-derived asymmetric case: TP=40 TN=30 FP=20 FN=10 (N=100)
    //   p_o = 0.7
    //   paper    p_e = (60*70 + 40*30)/10000 = 0.54 -> kappa = 0.16/0.46
    //   standard p_e = (60*50 + 40*50)/10000 = 0.50 -> kappa = 0.4
    // swapped (TP<->TN, FP<->FN): TP=30 TN=40 FP=10 FN=20
    //   paper    p_e = (40*70 + 60*30)/10000 = 0.46 -> kappa = 0.24/0.54
    //   standard p_e unchanged -> kappa = 0.4
    const ConfusionMatrix cm{40, 30, 20, 10};
    const ConfusionMatrix swapped{30, 40, 10, 20};

    CHECK(kappa(cm, KappaVariant::Standard) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(kappa(swapped, KappaVariant::Standard) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(overall_accuracy(cm) == overall_accuracy(swapped));

    CHECK(kappa(cm, KappaVariant::Paper) == doctest::Approx(0.16 / 0.46).epsilon(1e-12));
    CHECK(kappa(swapped, KappaVariant::Paper) == doctest::Approx(0.24 / 0.54).epsilon(1e-12));
}

TEST_CASE("kappa never exceeds accuracy for nondegenerate p_e") {
    Rng rng(9);
    for (int trial = 0; trial < 2000; ++trial) {
        const ConfusionMatrix cm{rng.bounded(50), rng.bounded(50), rng.bounded(50),
                                 1 + rng.bounded(50)};
        const double p_o = overall_accuracy(cm);
        for (KappaVariant v : {KappaVariant::Paper, KappaVariant::Standard}) {
            const double k = kappa(cm, v);
            CHECK(k <= p_o + 1e-12);
            CHECK(k <= 1.0);
        }
    }
}

TEST_CASE("metrics over concatenated vectors equal metrics over summed matrices") {
    Rng rng(10);
    LabelVector p1, t1, p2, t2;
    for (int i = 0; i < 400; ++i) {
        p1.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
        t1.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
    }
    for (int i = 0; i < 300; ++i) {
        p2.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
        t2.push_back(rng.bounded(2) ? Label::Leaf : Label::Wood);
    }
    LabelVector pc = p1, tc = t1;
    pc.insert(pc.end(), p2.begin(), p2.end());
    tc.insert(tc.end(), t2.begin(), t2.end());

    ConfusionMatrix summed = confusion(p1, t1);
    summed += confusion(p2, t2);
    const ConfusionMatrix concat = confusion(pc, tc);
    CHECK(summed.tp == concat.tp);
    CHECK(summed.tn == concat.tn);
    CHECK(summed.fp == concat.fp);
    CHECK(summed.fn == concat.fn);
    CHECK(overall_accuracy(summed) == overall_accuracy(concat));
    CHECK(kappa(summed, KappaVariant::Paper) == kappa(concat, KappaVariant::Paper));
}

TEST_CASE("improvement is the plain metric difference") {
    // Table-3 style: automatic 0.9590/0.8258 vs manual 0.8801/0.5775
    const Metrics automatic{0.9590, 0.8258, 0.8258};
    const Metrics manual{0.8801, 0.5775, 0.5775};
    const Metrics diff = improvement(automatic, manual);
    CHECK(diff.p_o == doctest::Approx(0.0789).epsilon(1e-12));
    CHECK(diff.kappa_paper == doctest::Approx(0.2483).epsilon(1e-12));
}

TEST_CASE("report CSV and table carry all columns") {
    TempDir dir;
    const ConfusionMatrix cm{40, 40, 10, 10};
    const std::vector<ReportRow> rows = {{"tree_1", "auto", metrics(cm), cm}};
    write_report_csv(rows, dir.file("report.csv"));

    std::ifstream in(dir.file("report.csv"));
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "tree,method,p_o,kappa_paper,kappa_standard,TP,TN,FP,FN");
    CHECK(line.find("tree_1,auto,0.8") == 0);
    CHECK(line.find(",40,40,10,10") != std::string::npos);

    const std::string table = format_report_table(rows);
    CHECK(table.find("tree_1") != std::string::npos);
    CHECK(table.find("0.6000") != std::string::npos);
}
