#include <run_acceptance.hpp>

#include <iostream>

int main() {
  int failures = dqacc::run_acceptance_suite(std::cout);
  return failures == 0 ? 0 : 2;
}
