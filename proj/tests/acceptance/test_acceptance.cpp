#include <gtest/gtest.h>

#include <iostream>
#include <map>

#include "mdtube/acceptance.hpp"

namespace {

std::map<int, mdtube::CriterionResult>& results() {
    static std::map<int, mdtube::CriterionResult> r;
    return r;
}

class Acceptance : public ::testing::TestWithParam<int> {
protected:
    static void SetUpTestSuite() {
        if (!results().empty()) return;
        mdtube::AcceptanceOptions opt;
        opt.on_result = [](const mdtube::CriterionResult& r) {
            std::cout << mdtube::format_criterion(r) << std::endl;
        };
        for (const auto& r : mdtube::run_acceptance(opt)) results()[r.id] = r;
    }
};

TEST_P(Acceptance, Criterion) {
    const auto it = results().find(GetParam());
    ASSERT_NE(it, results().end());
    EXPECT_TRUE(it->second.passed) << mdtube::format_criterion(it->second);
}

INSTANTIATE_TEST_SUITE_P(Criteria, Acceptance, ::testing::Range(1, mdtube::kNumCriteria + 1));

}  // namespace

int main(int argc, char** argv) {
    ::testing::InitGoogleTest(&argc, argv);
    return RUN_ALL_TESTS();
}
