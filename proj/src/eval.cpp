#include "nids/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "nids/error.hpp"

namespace nids {

std::uint64_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

ConfusionMatrix confusion(const std::vector<int> &actual, const std::vector<int> &predicted,
                          std::size_t n_classes) {
    if (actual.size() != predicted.size())
        throw DataError("confusion: actual/predicted length mismatch");
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(n_classes * n_classes, 0);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const int a = actual[i];
        const int p = predicted[i];
        if (a < 0 || static_cast<std::size_t>(a) >= n_classes || p < 0 ||
            static_cast<std::size_t>(p) >= n_classes)
            throw DataError("confusion: label out of range");
        cm.at(static_cast<std::size_t>(a), static_cast<std::size_t>(p)) += 1;
    }
    return cm;
}

EvalReport metrics(const ConfusionMatrix &cm, std::vector<std::string> class_names) {
    const std::size_t k = cm.n_classes;
    if (k == 0 || cm.total() == 0)
        throw DataError("metrics: empty confusion matrix");
    if (class_names.empty()) {
        for (std::size_t c = 0; c < k; ++c)
            class_names.push_back("class" + std::to_string(c));
    }
    if (class_names.size() != k)
        throw DataError("metrics: class name count does not match matrix size");

    EvalReport rep;
    rep.cm = cm;
    rep.class_names = std::move(class_names);
    rep.per_class.resize(k);

    std::uint64_t diag = 0;
    double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
    double weighted_p = 0.0, weighted_r = 0.0, weighted_f = 0.0;
    const double total = static_cast<double>(cm.total());

    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t tp = cm.at(c, c);
        std::uint64_t actual_c = 0, predicted_c = 0;
        for (std::size_t j = 0; j < k; ++j) {
            actual_c += cm.at(c, j);
            predicted_c += cm.at(j, c);
        }
        diag += tp;
        ClassMetrics &m = rep.per_class[c];
        m.support = actual_c;
        if (predicted_c == 0) {
            m.precision = 0.0;
            m.precision_undefined = true;
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(predicted_c);
        }
        if (actual_c == 0) {
            m.recall = 0.0;
            m.recall_undefined = true;
        } else {
            m.recall = static_cast<double>(tp) / static_cast<double>(actual_c);
        }
        if (m.precision + m.recall == 0.0) {
            m.f1 = 0.0;
            m.f1_undefined = m.precision_undefined && m.recall_undefined;
        } else {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        macro_p += m.precision;
        macro_r += m.recall;
        macro_f += m.f1;
        weighted_p += m.precision * static_cast<double>(actual_c);
        weighted_r += m.recall * static_cast<double>(actual_c);
        weighted_f += m.f1 * static_cast<double>(actual_c);
    }

    rep.accuracy = static_cast<double>(diag) / total;
    // single-label multi-class: global FP count equals global FN count, so
    // micro precision == micro recall == accuracy
    rep.micro = {rep.accuracy, rep.accuracy, rep.accuracy};
    rep.macro = {macro_p / static_cast<double>(k), macro_r / static_cast<double>(k),
                 macro_f / static_cast<double>(k)};
    rep.weighted = {weighted_p / total, weighted_r / total, weighted_f / total};
    return rep;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::string render_report(const EvalReport &rep) {
    std::ostringstream os;
    const std::size_t k = rep.cm.n_classes;
    std::size_t name_w = 10;
    for (const auto &n : rep.class_names)
        name_w = std::max(name_w, n.size() + 2);

    os << "Confusion matrix (rows = actual, columns = predicted)\n";
    os << std::string(name_w, ' ');
    for (const auto &n : rep.class_names)
        os << ' ' << n << std::string(n.size() < 11 ? 12 - n.size() : 1, ' ');
    os << '\n';
    for (std::size_t a = 0; a < k; ++a) {
        os << rep.class_names[a] << std::string(name_w - rep.class_names[a].size(), ' ');
        for (std::size_t p = 0; p < k; ++p) {
            char buf[24];
            std::snprintf(buf, sizeof(buf), " %12llu",
                          static_cast<unsigned long long>(rep.cm.at(a, p)));
            os << buf;
        }
        os << '\n';
    }
    os << '\n';
    os << "class" << std::string(name_w - 5, ' ') << " precision   recall      f1          support\n";
    for (std::size_t c = 0; c < k; ++c) {
        const auto &m = rep.per_class[c];
        os << rep.class_names[c] << std::string(name_w - rep.class_names[c].size(), ' ');
        os << ' ' << fmt(m.precision) << (m.precision_undefined ? "*" : " ") << "     "
           << fmt(m.recall) << (m.recall_undefined ? "*" : " ") << "    " << fmt(m.f1)
           << (m.f1_undefined ? "*" : " ") << "    " << m.support << '\n';
    }
    os << '\n';
    os << "micro     precision " << fmt(rep.micro.precision) << "  recall " << fmt(rep.micro.recall)
       << "  f1 " << fmt(rep.micro.f1) << '\n';
    os << "macro     precision " << fmt(rep.macro.precision) << "  recall " << fmt(rep.macro.recall)
       << "  f1 " << fmt(rep.macro.f1) << '\n';
    os << "weighted  precision " << fmt(rep.weighted.precision) << "  recall "
       << fmt(rep.weighted.recall) << "  f1 " << fmt(rep.weighted.f1) << '\n';
    os << "accuracy  " << fmt(rep.accuracy) << '\n';
    if (std::any_of(rep.per_class.begin(), rep.per_class.end(), [](const ClassMetrics &m) {
            return m.precision_undefined || m.recall_undefined || m.f1_undefined;
        }))
        os << "(* metric reported as 0: zero denominator)\n";
    return os.str();
}

std::string render_records(const EvalReport &rep) {
    std::ostringstream os;
    os << "record\tname\tprecision\trecall\tf1\tsupport\tflags\n";
    char buf[160];
    for (std::size_t c = 0; c < rep.cm.n_classes; ++c) {
        const auto &m = rep.per_class[c];
        std::string flags;
        if (m.precision_undefined)
            flags += 'P';
        if (m.recall_undefined)
            flags += 'R';
        if (m.f1_undefined)
            flags += 'F';
        if (flags.empty())
            flags = "-";
        std::snprintf(buf, sizeof(buf), "class\t%s\t%.17g\t%.17g\t%.17g\t%llu\t%s\n",
                      rep.class_names[c].c_str(), m.precision, m.recall, m.f1,
                      static_cast<unsigned long long>(m.support), flags.c_str());
        os << buf;
    }
    const auto agg = [&](const char *name, const Aggregates &a) {
        std::snprintf(buf, sizeof(buf), "aggregate\t%s\t%.17g\t%.17g\t%.17g\t%llu\t-\n", name,
                      a.precision, a.recall, a.f1,
                      static_cast<unsigned long long>(rep.cm.total()));
        os << buf;
    };
    agg("micro", rep.micro);
    agg("macro", rep.macro);
    agg("weighted", rep.weighted);
    std::snprintf(buf, sizeof(buf), "aggregate\taccuracy\t%.17g\t%.17g\t%.17g\t%llu\t-\n",
                  rep.accuracy, rep.accuracy, rep.accuracy,
                  static_cast<unsigned long long>(rep.cm.total()));
    os << buf;
    return os.str();
}

} // namespace nids
