// dafny-mock: seed-missing-paren
method Abs(a: int returns (r: int)
{
  if a < 0 { r := -a; } else { r := a; }
}
