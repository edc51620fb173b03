#pragma once
int d_helper(int v);
