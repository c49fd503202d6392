// pick the larger value
function pick(y, z) {
<<<<<<< A.js
  let x = max(y, 11)
||||||| O.js
  var x = max(y, 10)
=======
  var x = max(y, 11, z)
>>>>>>> B.js
  return x
}
