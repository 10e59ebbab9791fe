#include <iostream>

#include "acceptance.hpp"

int main() { return relayqkd::acceptance::run_all(std::cout) ? 0 : 1; }
