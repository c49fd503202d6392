generate: function(scope) {
    var self = this;
    return self.generateIntoBuffer(function(buffer) {
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
    });
}
