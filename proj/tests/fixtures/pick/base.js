// pick the larger value
function pick(y, z) {
  var x = max(y, 10)
  return x
}
