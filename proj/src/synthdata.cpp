#include "fairpost/synthdata.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "fairpost/errors.hpp"
#include "fairpost/learners.hpp"
#include "fairpost/numeric.hpp"
#include "fairpost/rng.hpp"

namespace fairpost {

namespace {

std::string fixed4(double x) {
    return format_double(std::round(x * 1e4) / 1e4);
}

std::string fixed2(double x) {
    return format_double(std::round(x * 1e2) / 1e2);
}

void write_adult(std::ostream& out, std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    out << "age,education,education_num,hours_per_week,capital_gain,sex,income\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const bool male = rng.next_unit() < 0.67;
        const double skill = clamp01(rng.next_unit() + (male ? 0.05 : -0.05));
        const char* education = "HS-grad";
        int education_num = 9;
        if (skill >= 0.88) {
            education = "Masters";
            education_num = 14;
        } else if (skill >= 0.62) {
            education = "Bachelors";
            education_num = 13;
        } else if (skill >= 0.35) {
            education = "Some-college";
            education_num = 10;
        }
        const int age = 17 + static_cast<int>(46.0 * rng.next_unit());
        const int hours = (male ? 38 : 22) + static_cast<int>(18.0 * rng.next_unit());
        const int gain =
            rng.next_unit() < 0.1 ? static_cast<int>(15000.0 * rng.next_unit()) : 0;
        const double edu_frac = (education_num - 9) / 5.0;
        const double hours_frac = (hours - 20) / 36.0;
        const double gain_frac = gain / 15000.0;
        const double z = -2.6 + 2.2 * edu_frac + 2.2 * hours_frac + 1.0 * gain_frac +
                         0.35 * rng.next_gaussian();
        const int income = rng.next_unit() < sigmoid(z) ? 1 : 0;
        out << age << ',' << education << ',' << education_num << ',' << hours << ','
            << gain << ',' << (male ? "Male" : "Female") << ',' << income << '\n';
    }
}

void write_communities(std::ostream& out, std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    out << "population,pct_unemployed,median_income,pct_police_per_pop,"
           "majority_white,violent_crime_rate\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const bool white = rng.next_unit() < 0.55;
        const double u = rng.next_unit();
        const int population = 8000 + static_cast<int>(190000.0 * u * u);
        const double unemp = white ? 0.05 + 0.30 * rng.next_unit()
                                   : 0.42 + 0.38 * rng.next_unit();
        const int income = white ? 35000 + static_cast<int>(55000.0 * rng.next_unit())
                                 : 12000 + static_cast<int>(33000.0 * rng.next_unit());
        const bool police_missing = rng.next_unit() < 0.03;
        const double police = 0.8 + 2.4 * rng.next_unit();
        const double crime =
            clamp01(0.06 + 0.95 * unemp + 0.05 * rng.next_gaussian());
        out << population << ',' << fixed4(unemp) << ',' << income << ',';
        if (police_missing)
            out << '?';
        else
            out << fixed4(police);
        out << ',' << (white ? '1' : '0') << ',' << fixed4(crime) << '\n';
    }
}

void write_lawschool(std::ostream& out, std::size_t rows, std::uint64_t seed) {
    Rng rng(seed);
    out << "lsat,ugpa,family_income,white,zfygpa\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const bool white = rng.next_unit() < 0.84;
        const double lsat_raw = (white ? 37.0 : 30.5) + 5.5 * rng.next_gaussian();
        const int lsat = static_cast<int>(std::min(48.0, std::max(11.0, lsat_raw)));
        const double lsat_frac = (lsat - 11) / 37.0;
        const double ugpa = std::min(
            4.0, std::max(1.5, 1.8 + 1.4 * lsat_frac + 0.8 * rng.next_unit()));
        const int family_income =
            1 + static_cast<int>(std::min(4.0, 5.0 * clamp01(rng.next_unit() +
                                                             (white ? 0.12 : -0.12))));
        const double ugpa_frac = (ugpa - 1.5) / 2.5;
        const double gpa = clamp01(0.12 + 0.45 * lsat_frac + 0.30 * ugpa_frac +
                                   0.08 * rng.next_gaussian());
        out << lsat << ',' << fixed2(ugpa) << ',' << family_income << ','
            << (white ? "true" : "false") << ',' << fixed4(gpa) << '\n';
    }
}

}  // namespace

SynthKind parse_synth_kind(const std::string& name) {
    if (name == "adult") return SynthKind::adult;
    if (name == "communities") return SynthKind::communities;
    if (name == "lawschool") return SynthKind::lawschool;
    throw ValidationError("unknown synthetic dataset: " + name);
}

std::string synth_kind_name(SynthKind kind) {
    switch (kind) {
        case SynthKind::adult: return "adult";
        case SynthKind::communities: return "communities";
        case SynthKind::lawschool: return "lawschool";
    }
    throw ValidationError("bad synth kind");
}

std::size_t synth_default_rows(SynthKind kind) {
    switch (kind) {
        case SynthKind::adult: return 48842;
        case SynthKind::communities: return 1994;
        case SynthKind::lawschool: return 20649;
    }
    throw ValidationError("bad synth kind");
}

std::string synth_schema_text(SynthKind kind) {
    switch (kind) {
        case SynthKind::adult:
            return "task = logistic\n"
                   "sensitive = sex\n"
                   "target = income\n"
                   "sensitive_true = Male\n"
                   "column.age = numeric\n"
                   "column.education = categorical\n"
                   "column.education_num = numeric\n"
                   "column.hours_per_week = numeric\n"
                   "column.capital_gain = numeric\n";
        case SynthKind::communities:
            return "task = square\n"
                   "sensitive = majority_white\n"
                   "target = violent_crime_rate\n"
                   "column.population = numeric\n"
                   "column.pct_unemployed = numeric\n"
                   "column.median_income = numeric\n"
                   "column.pct_police_per_pop = numeric\n";
        case SynthKind::lawschool:
            return "task = square\n"
                   "sensitive = white\n"
                   "target = zfygpa\n"
                   "column.lsat = numeric\n"
                   "column.ugpa = numeric\n"
                   "column.family_income = numeric\n";
    }
    throw ValidationError("bad synth kind");
}

void write_synth_csv(std::ostream& out, SynthKind kind, std::size_t rows,
                     std::uint64_t seed) {
    switch (kind) {
        case SynthKind::adult: write_adult(out, rows, seed); return;
        case SynthKind::communities: write_communities(out, rows, seed); return;
        case SynthKind::lawschool: write_lawschool(out, rows, seed); return;
    }
    throw ValidationError("bad synth kind");
}

void write_synth_files(const std::string& csv_path, const std::string& schema_path,
                       SynthKind kind, std::size_t rows, std::uint64_t seed) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot write dataset: " + csv_path);
    write_synth_csv(csv, kind, rows, seed);
    if (!csv.flush()) throw DataError("failed writing dataset: " + csv_path);
    std::ofstream schema(schema_path, std::ios::binary);
    if (!schema) throw DataError("cannot write schema: " + schema_path);
    schema << synth_schema_text(kind);
    if (!schema.flush()) throw DataError("failed writing schema: " + schema_path);
}

}  // namespace fairpost
