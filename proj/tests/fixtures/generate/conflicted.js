generate: function(scope) {
    var self = this;
<<<<<<< A.js
    return self.generateIntoBuffer(function(buffer) {
        buffer.write("[");
        codegenUtils.writeToBufferWithDelimiter(self.items, ",", 
                                                buffer, scope);
        return buffer.write("]");
    });
||||||| O.js
    buffer.write("[");
    codegenUtils.writeToBufferWithDelimiter(self.items, ",", 
                                            buffer, scope);
    return buffer.write("]");
=======
    var splatArguments;
    splatArguments = terms.splatArguments(self.items);
    if (splatArguments) {
        return splatArguments.generateJavaScript(buffer, scope);
    } else {
        buffer.write("[");
        codegenUtils.writeToBufferWithDelimiter(self.items, ",", 
                                                buffer, scope);
        return buffer.write("]");
    }
>>>>>>> B.js
}
