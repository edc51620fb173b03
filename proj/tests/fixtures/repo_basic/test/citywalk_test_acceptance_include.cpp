#include "a.h"
int main() { return clamp_positive(-3); }
